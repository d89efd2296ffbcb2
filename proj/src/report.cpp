#include "geoentropy/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "json.hpp"

namespace geoentropy {

namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json slopes_json(const std::vector<SlopeFit>& profile) {
  auto arr = ordered_json::array();
  for (auto& f : profile)
    arr.push_back({{"epsilon", f.epsilon},
                   {"slope", f.slope},
                   {"raw_slope", f.raw_slope},
                   {"residual", f.residual},
                   {"r_first", f.r_first},
                   {"r_last", f.r_last},
                   {"points", f.points},
                   {"saturated", f.saturated}});
  return arr;
}

ordered_json solver_json(const SolveMode& mode) {
  ordered_json j;
  j["mode"] = mode.is_beam() ? "beam" : "exhaustive";
  if (mode.is_beam()) j["width"] = mode.width;
  j["seed"] = mode.seed;
  return j;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_counts_csv(std::ostream& out, const std::vector<SeparatedCount>& counts) {
  out << "r,epsilon,N,method,ln_N_over_r\n";
  for (auto& c : counts)
    out << format_number(c.r) << ',' << format_number(c.epsilon) << ',' << c.count << ','
        << to_string(c.method) << ',' << format_number(std::log(static_cast<double>(c.count)) / c.r) << '\n';
}

void write_matrix_csv(std::ostream& out, const PursuitMatrix& m) {
  const auto& mode = m.mode();
  out << "# kind=" << to_string(m.kind()) << " r=" << format_number(m.r()) << " T=" << m.steps()
      << " mode=" << (mode.is_beam() ? "beam" : "exhaustive");
  if (mode.is_beam()) out << " width=" << mode.width;
  out << " seed=" << mode.seed << " cutoff=" << format_number(m.cutoff())
      << " exact=" << m.count(Exactness::exact) << " lower_bound=" << m.count(Exactness::lower_bound)
      << " capped=" << m.count(Exactness::capped) << '\n';
  out << "id";
  for (PointId id : m.ids()) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.ids()[i];
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << format_number(m.value(i, j));
    out << '\n';
  }
}

std::string summary_json(const EntropyEstimate& e, const RunInfo& info) {
  ordered_json j;
  j["structure"] = info.structure;
  j["local"] = e.local;
  j["r_grid"] = info.r_grid;
  j["epsilon_grid"] = info.epsilon_grid;
  j["steps"] = info.steps;
  j["solver"] = solver_json(info.mode);
  j["count_method"] = to_string(info.method);
  j["h"] = e.h;
  j["H"] = e.H ? ordered_json(*e.H) : ordered_json(nullptr);
  j["headline_epsilon"] = e.headline_epsilon;
  j["slopes"] = slopes_json(e.profile);
  j["slopes_D"] = slopes_json(e.profile_D);
  const auto& d = e.diagnostics;
  ordered_json diag;
  diag["points"] = d.points;
  diag["leaves"] = d.leaves;
  diag["lemma_constant"] = number_or_null(d.lemma_constant);
  diag["discretization_floor"] = d.floor;
  diag["dropped_edges"] = d.dropped_edges;
  diag["max_out_degree"] = d.max_out_degree;
  diag["snap_error"] = d.snap_error;
  diag["exact_pairs"] = d.exact_pairs;
  diag["lower_bound_pairs"] = d.lower_bound_pairs;
  diag["capped_pairs"] = d.capped_pairs;
  diag["all_exact"] = d.all_exact;
  if (!e.counts_D.empty()) diag["D_above_d_pairs"] = d.D_above_d;
  j["diagnostics"] = diag;
  return j.dump(2) + "\n";
}

}  // namespace geoentropy
