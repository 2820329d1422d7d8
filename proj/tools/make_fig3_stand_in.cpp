// Writes a synthetic t_seconds,count series drawn from the mean-excitation
// model at rate 14 kHz, c = 270, A = 3200 with 2% multiplicative Gaussian
// noise.  It stands in for the measured series, which is not distributed.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "jamming/fit.hpp"
#include "jamming/io.hpp"
#include "jamming/rng.hpp"
#include "jamming/scenarios.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fig3_stand_in <output.csv>\n";
    return 2;
  }
  namespace sc = jamming::scenarios;
  constexpr int kPoints = 30;
  constexpr double kNoise = 0.02;
  jamming::StreamEngine eng(jamming::RngSpec{20130, 0});
  std::ofstream out(argv[1], std::ios::binary);
  out << "t_seconds,count\n";
  for (int i = 0; i < kPoints; ++i) {
    const double t = 1e-5 * std::pow(100.0, static_cast<double>(i) / (kPoints - 1));
    const double u1 = 1.0 - jamming::uniform01(eng);
    const double u2 = jamming::uniform01(eng);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double y = jamming::model_mean(t, sc::kSeriesRate, sc::kSeriesNeighbors, sc::kSeriesAmplitude) * (1.0 + kNoise * z);
    out << jamming::format_double(t) << ',' << jamming::format_double(y) << '\n';
  }
  return out ? 0 : 1;
}
