#ifndef CSTARS_ORBIT_HPP
#define CSTARS_ORBIT_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cstars/vec3.hpp"

namespace cstars::orbit {

/** Spherical Earth constants used throughout the simulator.
 *  mu is the gravitational parameter in km^3/s^2, radius in km. */
struct EarthModel {
    double mu_km3_s2 = 398600.4418;
    double radius_km = 6371.0;
};

/** Classical Keplerian element set. Angles in radians, lengths in km.
 *  epoch_s is the simulation time the mean anomaly refers to. */
struct KeplerianElements {
    double semi_major_axis_km = 0.0;
    double eccentricity = 0.0;
    double inclination_rad = 0.0;
    double raan_rad = 0.0;
    double arg_perigee_rad = 0.0;
    double mean_anomaly_rad = 0.0;
    double epoch_s = 0.0;
};

/** Inertial position/velocity at time t_s. Frame: x toward the vernal
 *  equinox, z along Earth's spin axis, y completing the right-handed set. */
struct StateVector {
    Vec3 position_km;
    Vec3 velocity_km_s;
    double t_s = 0.0;
};

class TleError : public std::runtime_error {
public:
    explicit TleError(const std::string& msg) : std::runtime_error(msg) {}
};

class TleLineLengthError : public TleError {
public:
    explicit TleLineLengthError(const std::string& msg) : TleError(msg) {}
};

class TleChecksumError : public TleError {
public:
    explicit TleChecksumError(const std::string& msg) : TleError(msg) {}
};

class TleFieldError : public TleError {
public:
    explicit TleFieldError(const std::string& msg) : TleError(msg) {}
};

class InvalidElementsError : public std::runtime_error {
public:
    explicit InvalidElementsError(const std::string& msg) : std::runtime_error(msg) {}
};

class NoConvergenceError : public std::runtime_error {
public:
    explicit NoConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

class TimestampMismatchError : public std::runtime_error {
public:
    explicit TimestampMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Parses one element set from the standard two-line format (69 characters
 *  per line, mod-10 checksums). The semi-major axis is recovered from the
 *  mean motion. epoch_s is absolute seconds since 2000-01-01 00:00:00 UT;
 *  load_tle_file rebases epochs so the earliest set sits at t = 0. */
KeplerianElements parse_tle(const std::string& line1, const std::string& line2,
                            const EarthModel& earth = {});

/** Reads a text file of concatenated two-line element sets. Blank lines and
 *  name lines (anything not starting with '1 ' / '2 ') are skipped. */
std::vector<KeplerianElements> load_tle_file(const std::string& path,
                                             const EarthModel& earth = {});

/** Solves E - e*sin(E) = M for the eccentric anomaly. Newton iteration to
 *  1e-12 rad with a bisection fallback; the bracket [M-e, M+e] always
 *  contains the root because the residual is monotone for e < 1. */
double solve_kepler(double mean_anomaly_rad, double eccentricity,
                    double tol_rad = 1e-12, int max_iter = 50);

/** Converts elements to an inertial state at the element epoch. */
StateVector elements_to_state(const KeplerianElements& el, const EarthModel& earth = {});

/** Recovers elements from an inertial state. Near-circular and
 *  near-equatorial sets use the standard conventions (arg of perigee zero,
 *  node along +x) so the round trip stays well defined. */
KeplerianElements state_to_elements(const StateVector& sv, const EarthModel& earth = {});

/** Advances a state by dt_s along the unperturbed two-body orbit. */
StateVector propagate(const StateVector& sv, double dt_s, const EarthModel& earth = {});

/** True when the segment between the two satellites clears the Earth
 *  sphere: the closest approach of the chord to the Earth's center either
 *  exceeds the radius or falls outside the segment. Both states must carry
 *  the same timestamp. */
bool line_of_sight(const StateVector& a, const StateVector& b, const EarthModel& earth = {});

/** Circular orbit speed at radius r, sqrt(mu/r). */
double circular_speed_km_s(double radius_km, const EarthModel& earth = {});

/** Orbital period of a semi-major axis, 2*pi*sqrt(a^3/mu). */
double orbital_period_s(double semi_major_axis_km, const EarthModel& earth = {});

}  // namespace cstars::orbit

#endif
