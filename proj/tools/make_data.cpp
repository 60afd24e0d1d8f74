// Regenerates the bundled data files: a synthetic weather record with a
// clear-sky irradiance profile and correlated cloud deviations, and a single
// day of household load with the mean solar power of that record.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>

#include "fsdp/fixtures.hpp"
#include "fsdp/rng.hpp"
#include "fsdp/solar.hpp"

namespace {

constexpr std::size_t kStages = 48;
constexpr std::size_t kDays = 60;

double clear_sky(double hour) {
  if (hour <= 6.0 || hour >= 19.0) return 0.0;
  return 1000.0 * std::pow(std::sin(std::numbers::pi * (hour - 6.0) / 13.0), 1.3);
}

double bump(double hour, double center, double width) {
  double d = (hour - center) / width;
  return std::exp(-0.5 * d * d);
}

double household_load(double hour) {
  return 0.35 + 0.6 * bump(hour, 7.5, 1.0) + 0.4 * bump(hour, 12.5, 1.5) + 0.8 * bump(hour, 15.5, 2.0) +
         1.8 * bump(hour, 18.5, 2.2);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : FSDP_DATA_DIR;
  fsdp::CounterRng rng(2024, 0);
  fsdp::solar::WeatherSeries w;
  w.names = {"irradiance", "temperature", "humidity"};
  w.stages_per_day = kStages;
  w.days = kDays;
  w.values.assign(3, fsdp::Vec(kStages * kDays));
  double cloud = 0.0, anomaly = 0.0;
  for (std::size_t d = 0; d < kDays; ++d) {
    anomaly = 0.7 * anomaly + std::sqrt(1.0 - 0.49) * rng.normal();
    for (std::size_t s = 0; s < kStages; ++s) {
      const std::size_t t = d * kStages + s;
      const double hour = 0.5 * static_cast<double>(s);
      cloud = 0.9 * cloud + std::sqrt(1.0 - 0.81) * rng.normal();
      const double c = std::clamp(0.25 + 0.2 * cloud, 0.0, 0.9);
      const double sky = clear_sky(hour);
      double irr = 0.0;
      if (sky > 0.0) irr = std::max(0.0, sky * (1.0 - c) + 15.0 * rng.normal());
      const double temp = 22.0 + 9.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) + 3.0 * anomaly -
                          6.0 * (c - 0.25) + 0.5 * rng.normal();
      const double hum = std::clamp(35.0 - 1.2 * (temp - 22.0) + 25.0 * (c - 0.25) + 2.0 * rng.normal(), 5.0, 100.0);
      w.values[0][t] = irr;
      w.values[1][t] = temp;
      w.values[2][t] = hum;
    }
  }
  fsdp::solar::write_weather_csv(w, dir + "/tempe_weather.csv");

  // Solar power of the day equals the model's mean profile, read back from
  // the file just written so the numbers match what the library sees.
  auto data = fsdp::solar::normalize(fsdp::solar::read_weather_csv(dir + "/tempe_weather.csv"));
  auto model = fsdp::solar::fit(data, {0});
  std::ofstream out(dir + "/synthetic_day.csv");
  out << "stage,load_kw,solar_kw\n" << std::setprecision(17);
  for (std::size_t k = 0; k <= kStages; ++k) {
    double hour = 0.5 * static_cast<double>(k);
    out << k << ',' << household_load(hour) << ','
        << fsdp::solar::power_at(model, 0, static_cast<int>(k), 0.0, fsdp::fixtures::kSolarKwPerUnit) << '\n';
  }
  std::cout << "wrote " << dir << "/tempe_weather.csv and " << dir << "/synthetic_day.csv\n";
  return 0;
}
