#include "ncps/report.hpp"

#include <cmath>
#include <stdexcept>

namespace ncps {

ResidualEntry& ResidualReport::entry(const std::string& name) {
  for (auto& e : entries_)
    if (e.name == name) return e;
  entries_.push_back(ResidualEntry{name, 0.0, 0.0, {}, 0});
  return entries_.back();
}

void ResidualReport::accumulate(const std::string& name, double value, PointView at) {
  ResidualEntry& e = entry(name);
  const double a = std::fabs(value);
  // running mean of |value|
  e.mean_abs = (e.mean_abs * static_cast<double>(e.samples) + a) /
               static_cast<double>(e.samples + 1);
  ++e.samples;
  if (a >= e.max_abs) {
    e.max_abs = a;
    e.argmax_point.assign(at.begin(), at.end());
  }
}

void ResidualReport::add_entry(ResidualEntry e) { entries_.push_back(std::move(e)); }

const ResidualEntry* ResidualReport::find(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return &e;
  return nullptr;
}

double ResidualReport::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.max_abs);
  return m;
}

const ResidualEntry* ResidualReport::worst() const {
  const ResidualEntry* w = nullptr;
  for (const auto& e : entries_)
    if (!w || e.max_abs > w->max_abs) w = &e;
  return w;
}

nlohmann::ordered_json ResidualReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    nlohmann::ordered_json o;
    o["name"] = e.name;
    o["max"] = e.max_abs;
    o["mean"] = e.mean_abs;
    o["argmax_point"] = e.argmax_point;
    arr.push_back(std::move(o));
  }
  return arr;
}

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double halton(unsigned long long index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<unsigned long long>(base));
    index /= static_cast<unsigned long long>(base);
  }
  return r;
}

}  // namespace

std::vector<PhasePoint> sample_points(int dim, const SampleBox& box) {
  if (dim < 1 || dim > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
    throw std::invalid_argument("sample_points: unsupported dimension");
  auto bound = [dim](const std::vector<double>& v, const char* which) {
    if (static_cast<int>(v.size()) == dim) return v;
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(dim), v[0]);
    throw std::invalid_argument(std::string("sample box ") + which +
                                " must have size 1 or dim");
  };
  const std::vector<double> lo = bound(box.lo, "lo");
  const std::vector<double> hi = bound(box.hi, "hi");

  std::vector<PhasePoint> pts;
  pts.reserve(static_cast<std::size_t>(box.count));
  const unsigned long long offset =
      static_cast<unsigned long long>(box.seed) * static_cast<unsigned long long>(box.count);
  for (int i = 0; i < box.count; ++i) {
    PhasePoint p(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
      const double u = halton(offset + static_cast<unsigned long long>(i) + 23ULL, kPrimes[a]);
      p[static_cast<std::size_t>(a)] =
          lo[static_cast<std::size_t>(a)] +
          u * (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace ncps
