#pragma once

#include "phamp/globalize.hpp"

#include <string>
#include <vector>

namespace phamp {

/// n pulses eps*v, T_s apart, then a gap T_p.
struct StimulusSpec {
    double eps = -0.1;
    Vec3 v = Vec3::UnitX();
    int n = 100;
    double Ts = 0.001;
    double Tp = 8.394;

    double total() const { return n * Ts + Tp; }
    void validate() const;
};

enum class MapKind { State, PhaseAmplitude, PhaseAmplitudeLinear, Slow, Phase };

MapKind parse_map_kind(const std::string& s); // state | pa | pa-lin | slow | phase
std::string to_string(MapKind k);

/// A point of any of the maps: `x` for the state map, (theta, s1, s2) for
/// the others (s1 = 0 on the slow manifold, s1 = s2 = 0 on the cycle).
struct MapPoint {
    Vec3 x = Vec3::Zero();
    double theta = 0.0, s1 = 0.0, s2 = 0.0;
    bool has_state = false; // x holds K(theta, sigma) for the exact map
};

class StroboscopicMap {
public:
    StroboscopicMap(const PhaseAmplitude& pa, StimulusSpec stim, MapKind kind);

    MapKind kind() const { return kind_; }
    const StimulusSpec& stimulus() const { return stim_; }

    /// One train of pulses followed by the gap.
    MapPoint apply(const MapPoint& p) const;

    /// The cycle point of phase theta, in the map's own variables.
    MapPoint on_cycle(double theta) const;

    /// State coordinates: x itself, or K(theta, sigma).
    Vec3 state_of(const MapPoint& p) const;

    /// Distance in the map's own variables (phases compared on the circle);
    /// in state space when both points carry their state.
    double distance(const MapPoint& a, const MapPoint& b) const;

private:
    MapPoint kick(const MapPoint& p) const;

    const PhaseAmplitude& pa_;
    StimulusSpec stim_;
    MapKind kind_;
};

struct FixedPointRecord {
    MapPoint point;
    Vec3 state = Vec3::Zero();
    int iterations = 0;
    double step = 0.0; // last update size
    bool newton = false;
    bool converged = true; // false: stopped at the map's noise floor
    double spread = 0.0;   // max deviation from the reported mean over the last window
};

/// Direct iteration until the update is below tol, then a finite-difference
/// Newton fallback if iteration has not converged. If the update has not
/// halved for `stall_window` iterations the map is taken to be at its noise
/// floor; the mean of the last window is returned with converged = false.
FixedPointRecord fixed_point(const StroboscopicMap& F, const MapPoint& guess, double tol = 1e-8,
                             int max_iterations = 2000, int stall_window = 25);

std::vector<MapPoint> iterate(const StroboscopicMap& F, const MapPoint& start, int count);

struct FiniteResponse {
    double dtheta = 0.0, dsigma1 = 0.0, dsigma2 = 0.0;
};

/// Coordinates of K(theta, sigma) + A v minus (theta, sigma); the phase
/// difference is taken on the circle.
FiniteResponse prf_arf_finite(const PhaseAmplitude& pa, double A, const Vec3& v, double theta, double s1, double s2);

} // namespace phamp
