#pragma once

#include "phamp/strobe.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phamp {

/// Everything a run needs. Unset optionals take the model's defaults.
struct RunConfig {
    std::string model;
    ParamSet params;

    SolverOptions solver;
    std::optional<double> b1, b2, e_tol;
    DomainOptions domain;

    GlobalizationConfig globalize;
    std::optional<Vec3> omega_lo, omega_hi;
    std::vector<double> thetas{0.0};

    int isostable_i = 2;
    double isostable_c = 0.0;
    double isostable_c_star = 0.0;

    StimulusSpec stimulus;
    std::string map = "state";
    int iters = 80;

    std::string output_dir = "phamp-out";
    std::string cache_dir; // directory written by `solve`; reused when it matches
};

/// Sets one dotted key. Unknown keys are a UsageError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines; '#' starts a comment.
void read_config(RunConfig& cfg, std::istream& is, const std::string& source = "config");
void read_config_file(RunConfig& cfg, const std::filesystem::path& file);

std::vector<std::string> config_keys();

/// Lazily built stages; each failure is rethrown with the stage name.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const ModelSpec& model() const { return *spec_; }
    const VectorField& field() const { return *X_; }
    double e_tol() const;

    const Orbit& orbit();
    const TaylorFourierMap& map();
    /// Present when the map was solved rather than loaded.
    const std::optional<SolveReport>& solve_report() const { return report_; }
    bool map_from_cache() const { return from_cache_; }
    const AccuracyDomain& domain();
    const PhaseAmplitude& phase_amplitude();
    GlobalizationConfig globalization() const;

    /// Writes the map with run metadata to dir.
    void save_map(const std::filesystem::path& dir);

private:
    RunConfig cfg_;
    const ModelSpec* spec_ = nullptr;
    std::shared_ptr<const VectorField> X_;
    std::optional<Orbit> orbit_;
    std::optional<TaylorFourierMap> K_;
    std::optional<SolveReport> report_;
    bool from_cache_ = false;
    std::optional<AccuracyDomain> D_;
    std::unique_ptr<PhaseAmplitude> pa_;
};

} // namespace phamp
