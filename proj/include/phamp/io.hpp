#pragma once

#include "phamp/invariance.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace phamp {

namespace fs = std::filesystem;

std::string format_double(double v); // %.17g

/// Ordered `key = value` metadata; values are strings, numbers at 17 digits.
class Metadata {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, int value);
    void set(const std::string& key, const Vec3& v);
    void set(const std::string& key, const Mat3& m); // row-major

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    Vec3 vec3(const std::string& key) const;
    Mat3 mat3(const std::string& key) const;

    void write(const fs::path& file) const;
    static Metadata read(const fs::path& file);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string sha256_hex(const fs::path& file);

/// `<sha256>  <relative path>` per file, sorted by path, written to
/// dir/manifest.sha256 (the manifest itself excluded).
void write_manifest(const fs::path& dir);
/// Files whose hash no longer matches; empty if the directory is intact.
std::vector<std::string> verify_manifest(const fs::path& dir);

void write_grid(const fs::path& file, const PeriodicGrid& g);
PeriodicGrid read_grid(const fs::path& file);

/// floquet.meta plus gamma.grid, Phi.grid, Q.grid.
void write_floquet(const fs::path& dir, const FloquetData& fd);
std::shared_ptr<FloquetData> read_floquet(const fs::path& dir);

/// Floquet files, map.meta and K_<a>_<b>.grid for every monomial. `extra`
/// entries are appended to map.meta.
void write_map(const fs::path& dir, const TaylorFourierMap& K, const Metadata& extra = {});
TaylorFourierMap read_map(const fs::path& dir);

} // namespace phamp
