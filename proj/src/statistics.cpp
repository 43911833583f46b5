#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "chaosimg/error.hpp"
#include "chaosimg/io.hpp"
#include "chaosimg/source.hpp"

namespace chaosimg::source {

double ks_distance_exponential(std::span<const double> samples, double mean) {
  if (samples.empty()) throw Error("insufficient statistics");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // A zero mean makes the model a point mass at 0.
    const double cdf = mean > 0.0 ? 1.0 - std::exp(-std::max(sorted[i], 0.0) / mean) : 1.0;
    d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
  }
  return d;
}

ThermalReport thermal_statistics_report(std::span<const double> samples, int bins) {
  if (samples.size() < 100) throw Error("insufficient statistics");
  if (bins < 1) throw Error("thermal report: bin count must be positive");
  ThermalReport r;
  r.samples = samples.size();
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  r.mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - r.mean) * (v - r.mean);
  r.variance = ss / (n - 1.0);
  r.ks_distance = ks_distance_exponential(samples, r.mean);

  const double top = *std::max_element(samples.begin(), samples.end());
  const double width = top > 0.0 ? top / bins : 1.0;
  r.histogram.resize(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    auto& bin = r.histogram[static_cast<std::size_t>(b)];
    const double lo = b * width;
    const double hi = lo + width;
    bin.center = lo + 0.5 * width;
    if (r.mean > 0.0) bin.exponential_fit = n * (std::exp(-lo / r.mean) - std::exp(-hi / r.mean));
  }
  for (double v : samples) {
    auto b = static_cast<std::size_t>(std::clamp(static_cast<int>(v / width), 0, bins - 1));
    r.histogram[b].count += 1.0;
  }
  return r;
}

void write_histogram_csv(const std::filesystem::path& path, const ThermalReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "bin_center,count,exponential_fit\n";
  for (const auto& b : report.histogram) {
    out << io::format_double(b.center) << ',' << io::format_double(b.count) << ','
        << io::format_double(b.exponential_fit) << '\n';
  }
}

std::string report_text(const ThermalReport& report, const std::string& prefix) {
  std::ostringstream out;
  out << prefix << "samples=" << report.samples << '\n'
      << prefix << "mean=" << io::format_double(report.mean) << '\n'
      << prefix << "variance=" << io::format_double(report.variance) << '\n'
      << prefix << "variance_over_mean_sq="
      << io::format_double(report.mean > 0.0 ? report.variance / (report.mean * report.mean) : 0.0) << '\n'
      << prefix << "ks_distance=" << io::format_double(report.ks_distance) << '\n';
  return out.str();
}

}  // namespace chaosimg::source
