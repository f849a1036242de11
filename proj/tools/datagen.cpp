// Generates the synthetic benchmark datasets shipped under data/. Both are
// deterministic for a fixed seed: a 308x6 hull-resistance task (strong
// sixth-power trend in the last feature, mild hull-shape modulation, small
// noise floor) and a 1503x5 aerodynamic-noise task (log/threshold structure
// that a small {+,-,*,aq} tree can only approximate).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpg/rng.hpp"

namespace {

double gaussian(gpg::Rng& rng) {
  // Box-Muller; platform-stable because it only uses uniform_unit.
  double u1 = gpg::uniform_unit(rng);
  double u2 = gpg::uniform_unit(rng);
  u1 = std::max(u1, 1e-300);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

struct Row {
  std::vector<double> x;
  double y;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<Row>& rows) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[40];
  for (const Row& r : rows) {
    for (double v : r.x) {
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.12g", r.y);
    out << buf << "\n";
  }
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
}

// 22 hull configurations x 14 Froude numbers = 308 rows, 6 features.
std::vector<Row> make_hull_rows(std::uint64_t seed) {
  gpg::Rng rng(seed);
  std::vector<std::vector<double>> hulls;
  for (int h = 0; h < 22; ++h) {
    hulls.push_back({
        -5.0 + 5.0 * gpg::uniform_unit(rng),          // buoyancy center position
        0.53 + 0.07 * gpg::uniform_unit(rng),         // prismatic coefficient
        4.34 + 0.80 * gpg::uniform_unit(rng),         // length-displacement ratio
        2.81 + 2.54 * gpg::uniform_unit(rng),         // beam-draught ratio
        2.73 + 0.91 * gpg::uniform_unit(rng),         // length-beam ratio
    });
  }

  std::vector<Row> rows;
  std::vector<double> targets;
  for (const auto& hull : hulls) {
    for (int k = 0; k < 14; ++k) {
      double froude = 0.125 + 0.025 * k;
      double f2 = froude * froude;
      double f3 = f2 * froude;
      double f6 = f3 * f3;
      double resistance = 1150.0 * f6 * (0.65 + 0.9 * (hull[1] - 0.565)) + 32.0 * f3 +
                          1.1 * (hull[3] - 4.0) * f2;
      Row r;
      r.x = hull;
      r.x.push_back(froude);
      r.y = resistance;
      rows.push_back(std::move(r));
      targets.push_back(resistance);
    }
  }

  // Noise floor ~0.3% of signal variance, mirroring a low-noise bench test.
  double m = 0.0;
  for (double t : targets) m += t;
  m /= targets.size();
  double var = 0.0;
  for (double t : targets) var += (t - m) * (t - m);
  var /= targets.size();
  double sigma = std::sqrt(0.003 * var);
  for (Row& r : rows) r.y += sigma * gaussian(rng);
  return rows;
}

// 1503 rows, 5 features; the target mixes logarithms and saturation, so
// the best small arithmetic tree leaves a sizable residual.
std::vector<Row> make_aero_rows(std::uint64_t seed) {
  gpg::Rng rng(seed);
  const double velocities[4] = {31.7, 39.6, 55.5, 71.3};

  std::vector<Row> rows;
  std::vector<double> targets;
  for (int i = 0; i < 1503; ++i) {
    double u = gpg::uniform_unit(rng);
    double freq = std::exp(std::log(200.0) + u * (std::log(20000.0) - std::log(200.0)));
    double angle = 22.0 * gpg::uniform_unit(rng) * gpg::uniform_unit(rng);
    double chord = 0.025 + 0.275 * gpg::uniform_unit(rng);
    double vel = velocities[gpg::uniform_index(rng, 4)];
    double thickness = chord * (0.002 + 0.0045 * angle * (0.8 + 0.4 * gpg::uniform_unit(rng)));

    double strouhal = freq * thickness / vel;
    double level = 141.0 - 23.0 * std::log10(40.0 * strouhal + 1.3) -
                   0.9 * angle * vel / (vel + 80.0 * thickness * vel + 14.0) -
                   9.5 * std::log10(freq) * chord + 0.055 * vel +
                   6.0 * chord * angle / (0.4 + angle * thickness * 8.0);

    Row r;
    r.x = {freq, angle, chord, vel, thickness};
    r.y = level;
    rows.push_back(std::move(r));
    targets.push_back(level);
  }

  double m = 0.0;
  for (double t : targets) m += t;
  m /= targets.size();
  double var = 0.0;
  for (double t : targets) var += (t - m) * (t - m);
  var /= targets.size();
  double sigma = std::sqrt(0.02 * var);
  for (Row& r : rows) r.y += sigma * gaussian(rng);
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic benchmark datasets"};
  std::string out_dir = "data";
  std::uint64_t seed = 9;
  app.add_option("--out-dir", out_dir, "Output directory (must exist)");
  app.add_option("--seed", seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);

  write_csv(out_dir + "/yacht_like.csv",
            {"buoyancy_pos", "prismatic", "len_disp", "beam_draught", "len_beam", "froude",
             "resistance"},
            make_hull_rows(gpg::derive_seed(seed, 1)));
  write_csv(out_dir + "/airfoil_like.csv",
            {"frequency", "angle", "chord", "velocity", "thickness", "sound_level"},
            make_aero_rows(gpg::derive_seed(seed, 2)));
  return 0;
}
