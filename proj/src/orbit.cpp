#include "cstars/orbit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

namespace cstars::orbit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

int tle_checksum(const std::string& line) {
    int sum = 0;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        char c = line[i];
        if (c >= '0' && c <= '9') sum += c - '0';
        else if (c == '-') sum += 1;
    }
    return sum % 10;
}

double parse_field(const std::string& line, size_t pos, size_t len, const char* what) {
    std::string raw = line.substr(pos, len);
    size_t b = raw.find_first_not_of(' ');
    if (b == std::string::npos) throw TleFieldError(std::string("empty field: ") + what);
    size_t e = raw.find_last_not_of(' ');
    raw = raw.substr(b, e - b + 1);
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size())
        throw TleFieldError(std::string("unparsable field: ") + what + " '" + raw + "'");
    return v;
}

/* Days from 1970-01-01 to the given civil date (proleptic Gregorian). */
long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    long era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

}  // namespace

KeplerianElements parse_tle(const std::string& line1, const std::string& line2,
                            const EarthModel& earth) {
    if (line1.size() != 69)
        throw TleLineLengthError("line 1 must be 69 characters, got " +
                                 std::to_string(line1.size()));
    if (line2.size() != 69)
        throw TleLineLengthError("line 2 must be 69 characters, got " +
                                 std::to_string(line2.size()));
    if (line1[0] != '1') throw TleFieldError("line 1 must start with '1'");
    if (line2[0] != '2') throw TleFieldError("line 2 must start with '2'");

    for (const std::string* line : {&line1, &line2}) {
        char c = (*line)[68];
        if (c < '0' || c > '9') throw TleFieldError("checksum column is not a digit");
        if (tle_checksum(*line) != c - '0')
            throw TleChecksumError("mod-10 checksum mismatch on line " +
                                   std::string(1, (*line)[0]));
    }

    double epoch_yy = parse_field(line1, 18, 2, "epoch year");
    double epoch_day = parse_field(line1, 20, 12, "epoch day");

    KeplerianElements el;
    el.inclination_rad = wrap_angle(deg2rad(parse_field(line2, 8, 8, "inclination")));
    el.raan_rad = wrap_angle(deg2rad(parse_field(line2, 17, 8, "raan")));

    std::string ecc_raw = line2.substr(26, 7);
    for (char& c : ecc_raw)
        if (c == ' ') c = '0';
    el.eccentricity = std::strtod(("0." + ecc_raw).c_str(), nullptr);

    el.arg_perigee_rad = wrap_angle(deg2rad(parse_field(line2, 34, 8, "arg of perigee")));
    el.mean_anomaly_rad = wrap_angle(deg2rad(parse_field(line2, 43, 8, "mean anomaly")));

    double mm_rev_day = parse_field(line2, 52, 11, "mean motion");
    if (mm_rev_day <= 0.0) throw TleFieldError("mean motion must be positive");
    double n_rad_s = mm_rev_day * kTwoPi / 86400.0;
    el.semi_major_axis_km = std::cbrt(earth.mu_km3_s2 / (n_rad_s * n_rad_s));

    int year = static_cast<int>(epoch_yy);
    year += (year < 57) ? 2000 : 1900;
    long days = days_from_civil(year, 1, 1) - days_from_civil(2000, 1, 1);
    el.epoch_s = (static_cast<double>(days) + (epoch_day - 1.0)) * 86400.0;
    return el;
}

std::vector<KeplerianElements> load_tle_file(const std::string& path, const EarthModel& earth) {
    std::ifstream in(path);
    if (!in) throw TleError("cannot open TLE file: " + path);

    std::vector<KeplerianElements> out;
    std::string line, line1;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.rfind("1 ", 0) == 0) {
            line1 = line;
        } else if (line.rfind("2 ", 0) == 0) {
            if (line1.empty()) throw TleError("line 2 without a preceding line 1 in " + path);
            out.push_back(parse_tle(line1, line, earth));
            line1.clear();
        }
    }
    if (out.empty()) throw TleError("no element sets found in " + path);

    double t0 = out.front().epoch_s;
    for (const auto& el : out) t0 = std::min(t0, el.epoch_s);
    for (auto& el : out) el.epoch_s -= t0;
    return out;
}

double solve_kepler(double mean_anomaly_rad, double eccentricity, double tol_rad, int max_iter) {
    if (!(eccentricity >= 0.0) || eccentricity >= 1.0 || !std::isfinite(mean_anomaly_rad))
        throw NoConvergenceError("kepler solve needs finite M and 0 <= e < 1");

    double m = std::remainder(mean_anomaly_rad, kTwoPi);
    double e = eccentricity;
    double x = m + e * std::sin(m);
    for (int i = 0; i < max_iter; ++i) {
        double f = x - e * std::sin(x) - m;
        double fp = 1.0 - e * std::cos(x);
        double dx = f / fp;
        x -= dx;
        if (std::abs(dx) < tol_rad)
            return x + (mean_anomaly_rad - m);
    }

    /* Newton stalled (possible near e -> 1 with M near 0); fall back to
     * bisection on the monotone residual. */
    double lo = m - e, hi = m + e;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double f = mid - e * std::sin(mid) - m;
        if (f < 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < tol_rad)
            return 0.5 * (lo + hi) + (mean_anomaly_rad - m);
    }
    throw NoConvergenceError("kepler solve failed to converge");
}

StateVector elements_to_state(const KeplerianElements& el, const EarthModel& earth) {
    if (!(el.semi_major_axis_km > 0.0))
        throw InvalidElementsError("semi-major axis must be positive");
    if (!(el.eccentricity >= 0.0) || el.eccentricity >= 1.0)
        throw InvalidElementsError("eccentricity must lie in [0, 1)");

    double a = el.semi_major_axis_km;
    double e = el.eccentricity;
    double big_e = solve_kepler(el.mean_anomaly_rad, e);
    double nu = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(big_e / 2.0),
                                 std::sqrt(1.0 - e) * std::cos(big_e / 2.0));
    double r = a * (1.0 - e * std::cos(big_e));
    double p = a * (1.0 - e * e);

    Vec3 r_pf{r * std::cos(nu), r * std::sin(nu), 0.0};
    double vf = std::sqrt(earth.mu_km3_s2 / p);
    Vec3 v_pf{-vf * std::sin(nu), vf * (e + std::cos(nu)), 0.0};

    double co = std::cos(el.raan_rad), so = std::sin(el.raan_rad);
    double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
    double cw = std::cos(el.arg_perigee_rad), sw = std::sin(el.arg_perigee_rad);

    /* Rows of Rz(raan) * Rx(inc) * Rz(argp). */
    Vec3 row1{co * cw - so * sw * ci, -co * sw - so * cw * ci, so * si};
    Vec3 row2{so * cw + co * sw * ci, -so * sw + co * cw * ci, -co * si};
    Vec3 row3{sw * si, cw * si, ci};

    StateVector sv;
    sv.position_km = {row1.dot({r_pf.x, r_pf.y, r_pf.z}), row2.dot({r_pf.x, r_pf.y, r_pf.z}),
                      row3.dot({r_pf.x, r_pf.y, r_pf.z})};
    sv.velocity_km_s = {row1.dot({v_pf.x, v_pf.y, v_pf.z}), row2.dot({v_pf.x, v_pf.y, v_pf.z}),
                        row3.dot({v_pf.x, v_pf.y, v_pf.z})};
    sv.t_s = el.epoch_s;
    return sv;
}

KeplerianElements state_to_elements(const StateVector& sv, const EarthModel& earth) {
    const double mu = earth.mu_km3_s2;
    const Vec3& rv = sv.position_km;
    const Vec3& vv = sv.velocity_km_s;
    double r = rv.norm();
    double v2 = vv.norm2();
    if (r <= 0.0) throw InvalidElementsError("state at the origin has no elements");

    double inv_a = 2.0 / r - v2 / mu;
    if (inv_a <= 0.0) throw InvalidElementsError("state is not on a bound orbit");

    Vec3 h = rv.cross(vv);
    Vec3 node{-h.y, h.x, 0.0};
    Vec3 e_vec = (rv * (v2 - mu / r) - vv * rv.dot(vv)) / mu;
    double e = e_vec.norm();
    if (e >= 1.0) throw InvalidElementsError("state is not on a bound orbit");

    constexpr double kTiny = 1e-11;

    KeplerianElements el;
    el.semi_major_axis_km = 1.0 / inv_a;
    el.eccentricity = e;
    el.inclination_rad = std::acos(std::clamp(h.z / h.norm(), -1.0, 1.0));
    el.epoch_s = sv.t_s;

    bool equatorial = node.norm() < kTiny * h.norm();
    bool circular = e < kTiny;

    if (equatorial) {
        el.raan_rad = 0.0;
        node = {1.0, 0.0, 0.0};
    } else {
        el.raan_rad = wrap_angle(std::atan2(node.y, node.x));
        node = node.normalized();
    }

    double nu;
    if (circular) {
        el.arg_perigee_rad = 0.0;
        /* Argument of latitude doubles as the anomaly for circular orbits. */
        Vec3 y_axis = h.normalized().cross(node);
        nu = std::atan2(rv.dot(y_axis), rv.dot(node));
    } else {
        Vec3 y_axis = h.normalized().cross(node);
        el.arg_perigee_rad = wrap_angle(std::atan2(e_vec.dot(y_axis), e_vec.dot(node)));
        Vec3 e_unit = e_vec / e;
        Vec3 q_axis = h.normalized().cross(e_unit);
        nu = std::atan2(rv.dot(q_axis), rv.dot(e_unit));
    }

    double big_e = std::atan2(std::sqrt(1.0 - e * e) * std::sin(nu), e + std::cos(nu));
    el.mean_anomaly_rad = wrap_angle(big_e - e * std::sin(big_e));
    return el;
}

StateVector propagate(const StateVector& sv, double dt_s, const EarthModel& earth) {
    if (dt_s == 0.0) return sv;
    KeplerianElements el = state_to_elements(sv, earth);
    double n = std::sqrt(earth.mu_km3_s2 /
                         (el.semi_major_axis_km * el.semi_major_axis_km * el.semi_major_axis_km));
    el.mean_anomaly_rad = wrap_angle(el.mean_anomaly_rad + n * dt_s);
    el.epoch_s = sv.t_s + dt_s;
    return elements_to_state(el, earth);
}

bool line_of_sight(const StateVector& a, const StateVector& b, const EarthModel& earth) {
    if (a.t_s != b.t_s)
        throw TimestampMismatchError("line of sight needs states at the same time");

    const Vec3& pa = a.position_km;
    Vec3 d = b.position_km - pa;
    double dd = d.norm2();

    double s = 0.0;
    if (dd > 0.0) s = std::clamp(-pa.dot(d) / dd, 0.0, 1.0);
    Vec3 closest = pa + d * s;
    return closest.norm() > earth.radius_km;
}

double circular_speed_km_s(double radius_km, const EarthModel& earth) {
    return std::sqrt(earth.mu_km3_s2 / radius_km);
}

double orbital_period_s(double semi_major_axis_km, const EarthModel& earth) {
    return kTwoPi * std::sqrt(semi_major_axis_km * semi_major_axis_km * semi_major_axis_km /
                              earth.mu_km3_s2);
}

}  // namespace cstars::orbit
