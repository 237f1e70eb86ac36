#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "cstars/common.hpp"
#include "cstars/orbit.hpp"
#include "doctest.h"

using namespace cstars;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/* Appends the mod-10 checksum (digits count their value, minus signs count
 * one) to a 68-character line body. */
std::string with_checksum(const std::string& body) {
    REQUIRE(body.size() == 68);
    int sum = 0;
    for (char c : body) {
        if (c >= '0' && c <= '9') sum += c - '0';
        if (c == '-') sum += 1;
    }
    return body + static_cast<char>('0' + sum % 10);
}

std::string tle_line1(int satnum, int yy, double day) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "1 %05dU 98067A   %02d%012.8f  .00000000  00000-0  00000-0 0 %4d",
                  satnum, yy, day, 99);
    return with_checksum(buf);
}

std::string tle_line2(int satnum, double incl, double raan, double ecc, double argp, double ma,
                      double mm) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "2 %05d %8.4f %8.4f %07d %8.4f %8.4f %11.8f%5d", satnum, incl,
                  raan, static_cast<int>(std::llround(ecc * 1e7)), argp, ma, mm, 1);
    return with_checksum(buf);
}

double angle_diff(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

/* Brute segment sampling: minimum distance of the chord to the origin. */
double sampled_min_radius(const Vec3& a, const Vec3& b, int steps) {
    double best = a.norm();
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        best = std::min(best, (a + (b - a) * t).norm());
    }
    return best;
}

orbit::StateVector state_at_radius(Rng& rng, double radius) {
    // Random point on the sphere of that radius; velocity is irrelevant to
    // visibility.
    double z = rng.uniform(-1.0, 1.0);
    double phi = rng.uniform(0.0, kTwoPi);
    double s = std::sqrt(1.0 - z * z);
    orbit::StateVector sv;
    sv.position_km = Vec3{radius * s * std::cos(phi), radius * s * std::sin(phi), radius * z};
    sv.t_s = 0.0;
    return sv;
}

}  // namespace

TEST_SUITE("orbit") {
    TEST_CASE("kepler solutions satisfy the defining equation") {
        Rng rng(0x0eb17001ULL);
        for (double e : {0.0, 0.05, 0.3, 0.7, 0.95, 0.99}) {
            for (int i = 0; i < 200; ++i) {
                double m = rng.uniform(-10.0, 10.0);
                double big_e = orbit::solve_kepler(m, e);
                CHECK(std::abs(big_e - e * std::sin(big_e) - m) < 1e-10);
            }
        }
        CHECK(orbit::solve_kepler(1.234, 0.0) == doctest::Approx(1.234).epsilon(1e-15));
        CHECK_THROWS_AS((void)orbit::solve_kepler(1.0, 1.0), orbit::NoConvergenceError);
        CHECK_THROWS_AS((void)orbit::solve_kepler(1.0, -0.1), orbit::NoConvergenceError);
    }

    TEST_CASE("circular speed and period agree with the propagated dynamics") {
        double r = 6921.0;  // 550 km altitude
        double v = orbit::circular_speed_km_s(r);
        double period = orbit::orbital_period_s(r);

        orbit::StateVector sv;
        sv.position_km = {r, 0.0, 0.0};
        sv.velocity_km_s = {0.0, v, 0.0};
        sv.t_s = 0.0;

        // Quarter turn lands on the +y axis, full turn comes home.
        auto quarter = orbit::propagate(sv, period / 4.0);
        CHECK(quarter.position_km.x == doctest::Approx(0.0).scale(r));
        CHECK(quarter.position_km.y == doctest::Approx(r).epsilon(1e-9));
        CHECK(quarter.t_s == doctest::Approx(period / 4.0));
        auto full = orbit::propagate(sv, period);
        CHECK((full.position_km - sv.position_km).norm() < 1e-6);
        CHECK((full.velocity_km_s - sv.velocity_km_s).norm() < 1e-9);
    }

    TEST_CASE("elements round-trip through a state vector") {
        Rng rng(0x0eb17002ULL);
        for (int i = 0; i < 300; ++i) {
            orbit::KeplerianElements el;
            el.semi_major_axis_km = rng.uniform(6700.0, 42000.0);
            el.eccentricity = rng.uniform(0.01, 0.3);
            el.inclination_rad = rng.uniform(0.1, std::numbers::pi - 0.1);
            el.raan_rad = rng.uniform(0.1, 6.1);
            el.arg_perigee_rad = rng.uniform(0.1, 6.1);
            el.mean_anomaly_rad = rng.uniform(0.1, 6.1);
            el.epoch_s = rng.uniform(0.0, 1e4);

            auto sv = orbit::elements_to_state(el);
            auto back = orbit::state_to_elements(sv);
            REQUIRE(back.semi_major_axis_km ==
                    doctest::Approx(el.semi_major_axis_km).epsilon(1e-9));
            REQUIRE(back.eccentricity == doctest::Approx(el.eccentricity).epsilon(1e-8));
            REQUIRE(angle_diff(back.inclination_rad, el.inclination_rad) < 1e-9);
            REQUIRE(angle_diff(back.raan_rad, el.raan_rad) < 1e-8);
            REQUIRE(angle_diff(back.arg_perigee_rad, el.arg_perigee_rad) < 1e-7);
            REQUIRE(angle_diff(back.mean_anomaly_rad, el.mean_anomaly_rad) < 1e-7);
            REQUIRE(back.epoch_s == el.epoch_s);
        }
    }

    TEST_CASE("circular states use the argument-of-latitude convention") {
        orbit::KeplerianElements el;
        el.semi_major_axis_km = 7152.0;
        el.eccentricity = 0.0;
        el.inclination_rad = 1.2;
        el.raan_rad = 0.7;
        el.mean_anomaly_rad = 2.1;
        auto back = orbit::state_to_elements(orbit::elements_to_state(el));
        CHECK(back.arg_perigee_rad == 0.0);
        CHECK(back.eccentricity < 1e-10);
        CHECK(angle_diff(back.mean_anomaly_rad, 2.1) < 1e-9);
    }

    TEST_CASE("energy and angular momentum survive ten orbits of stepping") {
        orbit::KeplerianElements el;
        el.semi_major_axis_km = 7152.0;
        el.eccentricity = 0.001;
        el.inclination_rad = 86.4 * std::numbers::pi / 180.0;
        el.raan_rad = 0.5;
        el.mean_anomaly_rad = 0.0;

        const orbit::EarthModel earth;
        auto sv = orbit::elements_to_state(el);
        double mu = earth.mu_km3_s2;
        auto energy = [&](const orbit::StateVector& s) {
            return 0.5 * s.velocity_km_s.norm2() - mu / s.position_km.norm();
        };
        double e0 = energy(sv);
        double h0 = sv.position_km.cross(sv.velocity_km_s).norm();

        double period = orbit::orbital_period_s(el.semi_major_axis_km);
        double step = period / 100.0;
        for (int i = 0; i < 1000; ++i) sv = orbit::propagate(sv, step);

        CHECK(sv.t_s == doctest::Approx(1000.0 * step).epsilon(1e-12));
        CHECK(std::abs(energy(sv) - e0) / std::abs(e0) < 1e-8);
        CHECK(std::abs(sv.position_km.cross(sv.velocity_km_s).norm() - h0) / h0 < 1e-8);
    }

    TEST_CASE("degenerate elements and states are rejected") {
        orbit::KeplerianElements el;
        el.semi_major_axis_km = -1.0;
        CHECK_THROWS_AS((void)orbit::elements_to_state(el), orbit::InvalidElementsError);
        el.semi_major_axis_km = 7000.0;
        el.eccentricity = 1.5;
        CHECK_THROWS_AS((void)orbit::elements_to_state(el), orbit::InvalidElementsError);

        orbit::StateVector hyper;
        hyper.position_km = {7000.0, 0.0, 0.0};
        hyper.velocity_km_s = {0.0, 12.0, 0.0};  // past escape speed
        CHECK_THROWS_AS((void)orbit::state_to_elements(hyper), orbit::InvalidElementsError);
    }

    TEST_CASE("visibility: separation angle decides at a fixed altitude") {
        // Chord clearance at radius r and separation theta is r*cos(theta/2):
        // 6921 km gives 6503 km at 40 degrees (clear of 6371) and 6272 km at
        // 50 degrees (blocked).
        double r = 6921.0;
        auto at_angle = [&](double deg) {
            orbit::StateVector s;
            double th = deg * std::numbers::pi / 180.0;
            s.position_km = {r * std::cos(th), r * std::sin(th), 0.0};
            return s;
        };
        CHECK(orbit::line_of_sight(at_angle(0.0), at_angle(40.0)));
        CHECK_FALSE(orbit::line_of_sight(at_angle(0.0), at_angle(50.0)));
        CHECK_FALSE(orbit::line_of_sight(at_angle(0.0), at_angle(180.0)));
    }

    TEST_CASE("visibility respects the segment bounds, not the full line") {
        // The infinite line through these two points passes 5000 km from the
        // center, but the closest approach lies behind the first endpoint;
        // the segment itself stays above 6727 km.
        orbit::StateVector a, b;
        a.position_km = {5000.0, 4500.0, 0.0};
        b.position_km = {5000.0, 5500.0, 0.0};
        CHECK(orbit::line_of_sight(a, b));
    }

    TEST_CASE("visibility matches dense segment sampling") {
        Rng rng(0x0eb17003ULL);
        int checked = 0;
        while (checked < 500) {
            auto a = state_at_radius(rng, rng.uniform(6600.0, 9000.0));
            auto b = state_at_radius(rng, rng.uniform(6600.0, 9000.0));
            double sampled = sampled_min_radius(a.position_km, b.position_km, 10000);
            if (std::abs(sampled - 6371.0) < 2.0) continue;  // too close to call by sampling
            CHECK(orbit::line_of_sight(a, b) == (sampled > 6371.0));
            ++checked;
        }
    }

    TEST_CASE("visibility refuses states from different instants") {
        orbit::StateVector a, b;
        a.position_km = {7000.0, 0.0, 0.0};
        b.position_km = {0.0, 7000.0, 0.0};
        b.t_s = 1.0;
        CHECK_THROWS_AS((void)orbit::line_of_sight(a, b), orbit::TimestampMismatchError);
    }

    TEST_CASE("tle parsing recovers every element field") {
        auto l1 = tle_line1(25544, 20, 1.0);
        auto l2 = tle_line2(25544, 86.4, 180.0, 0.0001, 90.0, 45.0, 14.34218);
        auto el = orbit::parse_tle(l1, l2);

        const double rad = std::numbers::pi / 180.0;
        CHECK(el.inclination_rad == doctest::Approx(86.4 * rad).epsilon(1e-12));
        CHECK(el.raan_rad == doctest::Approx(180.0 * rad).epsilon(1e-12));
        CHECK(el.eccentricity == doctest::Approx(0.0001).epsilon(1e-12));
        CHECK(el.arg_perigee_rad == doctest::Approx(90.0 * rad).epsilon(1e-12));
        CHECK(el.mean_anomaly_rad == doctest::Approx(45.0 * rad).epsilon(1e-12));

        // Mean motion fixes the semi-major axis through Kepler's third law.
        double n = 14.34218 * kTwoPi / 86400.0;
        CHECK(el.semi_major_axis_km == doctest::Approx(std::cbrt(398600.4418 / (n * n))));
        // 2000-01-01 to 2020-01-01 spans 7305 days, five of them leap days.
        CHECK(el.epoch_s == doctest::Approx(7305.0 * 86400.0));

        // A different mean motion moves the axis, nothing else.
        auto el2 = orbit::parse_tle(l1, tle_line2(25544, 86.4, 180.0, 0.0001, 90.0, 45.0, 15.0));
        double n2 = 15.0 * kTwoPi / 86400.0;
        CHECK(el2.semi_major_axis_km == doctest::Approx(std::cbrt(398600.4418 / (n2 * n2))));
        CHECK(el2.inclination_rad == el.inclination_rad);
    }

    TEST_CASE("tle epoch arithmetic inside a year") {
        auto a = orbit::parse_tle(tle_line1(1, 20, 3.0), tle_line2(1, 50.0, 0.0, 0.001, 0.0, 0.0, 15.0));
        auto b = orbit::parse_tle(tle_line1(1, 20, 4.5), tle_line2(1, 50.0, 0.0, 0.001, 0.0, 0.0, 15.0));
        CHECK(b.epoch_s - a.epoch_s == doctest::Approx(1.5 * 86400.0));
    }

    TEST_CASE("tle rejects structural damage precisely") {
        auto l1 = tle_line1(25544, 20, 1.0);
        auto l2 = tle_line2(25544, 86.4, 180.0, 0.0001, 90.0, 45.0, 14.34218);

        CHECK_THROWS_AS((void)orbit::parse_tle(l1.substr(0, 68), l2), orbit::TleLineLengthError);
        CHECK_THROWS_AS((void)orbit::parse_tle(l1, l2 + " "), orbit::TleLineLengthError);

        auto bad = l1;
        bad[20] = (bad[20] == '0') ? '1' : '0';  // digit flip breaks the sum
        CHECK_THROWS_AS((void)orbit::parse_tle(bad, l2), orbit::TleChecksumError);

        auto swapped = l2;
        swapped[0] = '1';
        CHECK_THROWS_AS((void)orbit::parse_tle(l1, swapped), orbit::TleFieldError);

        auto garbage = l2;
        garbage.replace(52, 11, "xxxxxxxxxxx");
        // Fix the checksum so the field parser is what trips.
        garbage = with_checksum(garbage.substr(0, 68));
        CHECK_THROWS_AS((void)orbit::parse_tle(l1, garbage), orbit::TleFieldError);
    }

    TEST_CASE("tle files skip name lines and rebase epochs to zero") {
        namespace fs = std::filesystem;
        auto path = fs::temp_directory_path() / "cstars_tle_roundtrip.txt";
        std::ofstream out(path);
        out << "SAT ALPHA\n";
        out << tle_line1(100, 20, 5.0) << "\n";
        out << tle_line2(100, 86.4, 10.0, 0.001, 0.0, 0.0, 14.5) << "\n";
        out << "\n";
        out << "SAT BETA\n";
        out << tle_line1(101, 20, 3.0) << "\n";
        out << tle_line2(101, 86.4, 40.0, 0.001, 0.0, 0.0, 14.5) << "\n";
        out.close();

        auto els = orbit::load_tle_file(path.string());
        REQUIRE(els.size() == 2);
        // The earliest set anchors t = 0; file order is preserved.
        CHECK(els[0].epoch_s == doctest::Approx(2.0 * 86400.0));
        CHECK(els[1].epoch_s == doctest::Approx(0.0));
        fs::remove(path);

        CHECK_THROWS_AS((void)orbit::load_tle_file("/nonexistent/file.tle"), orbit::TleError);
    }
}
