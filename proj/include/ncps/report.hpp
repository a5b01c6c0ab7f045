#pragma once

// Residual bookkeeping shared by the verification operations, plus the
// deterministic low-discrepancy probe sampler.

#include <string>
#include <vector>

#include "ncps/fields.hpp"

#include "json.hpp"

namespace ncps {

struct ResidualEntry {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  PhasePoint argmax_point;
  long long samples = 0;
};

class ResidualReport {
 public:
  void accumulate(const std::string& name, double value, PointView at);
  void add_entry(ResidualEntry e);  // append a finished entry (distinct name)

  const std::vector<ResidualEntry>& entries() const { return entries_; }
  const ResidualEntry* find(const std::string& name) const;
  double max_abs() const;
  bool within(double tol) const { return max_abs() <= tol; }
  const ResidualEntry* worst() const;

  nlohmann::ordered_json to_json() const;

 private:
  ResidualEntry& entry(const std::string& name);
  std::vector<ResidualEntry> entries_;
};

// Halton points in a box. `seed` offsets the sequence so reports are
// reproducible yet shiftable; identical inputs give identical points.
struct SampleBox {
  std::vector<double> lo{-1.0};  // size dim, or size 1 to broadcast
  std::vector<double> hi{1.0};
  int count = 64;
  unsigned seed = 0;
};

std::vector<PhasePoint> sample_points(int dim, const SampleBox& box = {});

}  // namespace ncps
