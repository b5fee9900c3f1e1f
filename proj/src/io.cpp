// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coalfreeze {

using nlohmann::json;

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Rational rational_from_json(const json& v, bool& exact) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number_float()) {
    exact = false;
    return rational_from_double(v.get<double>());
  }
  throw std::invalid_argument("expected rational as \"p/q\" string or number");
}

}  // namespace

FreezeMeasure measure_from_json(const json& j) {
  FreezeMeasure m;
  bool exact = true;
  if (j.contains("exact") && j.at("exact").is_boolean())
    exact = j.at("exact").get<bool>();
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms")) {
      FreezeMeasure::Atom atom;
      atom.x = rational_from_json(a.at("x"), exact);
      atom.w = rational_from_json(a.at("w"), exact);
      m.atoms.push_back(std::move(atom));
    }
  }
  if (j.contains("beta")) {
    for (const auto& b : j.at("beta")) {
      FreezeMeasure::BetaComponent bc;
      bc.a = b.at("a").get<int>();
      bc.b = b.at("b").get<int>();
      bc.w = rational_from_json(b.at("w"), exact);
      m.betas.push_back(std::move(bc));
    }
  }
  if (j.contains("rho")) m.rho = rational_from_json(j.at("rho"), exact);
  m.exact = exact;
  m.validate();
  return m;
}

json measure_to_json(const FreezeMeasure& m) {
  json j;
  j["atoms"] = json::array();
  for (const auto& a : m.atoms)
    j["atoms"].push_back(
        {{"x", rational_to_string(a.x)}, {"w", rational_to_string(a.w)}});
  j["beta"] = json::array();
  for (const auto& b : m.betas)
    j["beta"].push_back(
        {{"a", b.a}, {"b", b.b}, {"w", rational_to_string(b.w)}});
  j["rho"] = rational_to_string(m.rho);
  if (!m.exact) j["exact"] = false;
  return j;
}

DecrementMatrix matrix_from_json(const json& j) {
  const Flavor flavor = flavor_from_name(j.at("flavor").get<std::string>());
  bool exact = true;
  std::vector<std::vector<Rational>> rows;
  for (const auto& jrow : j.at("rows")) {
    std::vector<Rational> row;
    for (const auto& v : jrow) row.push_back(rational_from_json(v, exact));
    rows.push_back(std::move(row));
  }
  return DecrementMatrix(flavor, std::move(rows), exact);
}

json matrix_to_json(const DecrementMatrix& q) {
  json rows = json::array();
  for (int b = 1; b <= q.n_max(); ++b) {
    json row = json::array();
    for (int k = 1; k <= b; ++k) row.push_back(rational_to_string(q.q(b, k)));
    rows.push_back(std::move(row));
  }
  return json{{"version", kFormatVersion},
              {"flavor", flavor_name(q.flavor())},
              {"rows", std::move(rows)}};
}

std::string matrix_to_csv(const DecrementMatrix& q) {
  std::ostringstream os;
  os << "# " << kFormatVersion << " decrement flavor=" << flavor_name(q.flavor())
     << " n=" << q.n_max() << "\n";
  os << "b,k,q_exact,q_float\n";
  for (int b = 1; b <= q.n_max(); ++b)
    for (int k = 1; k <= b; ++k)
      os << b << ',' << k << ',' << rational_to_string(q.q(b, k)) << ','
         << fmt_double(to_double(q.q(b, k))) << "\n";
  return os.str();
}

EppfTable eppf_from_json(const json& j) {
  EppfTable t;
  t.n_max = j.at("n_max").get<int>();
  bool exact = true;
  for (const auto& item : j.at("values")) {
    std::vector<int> parts;
    for (const auto& v : item.at("partition")) parts.push_back(v.get<int>());
    t.values[IntegerPartition::of(std::move(parts))] =
        rational_from_json(item.at("p"), exact);
  }
  t.exact = exact;
  return t;
}

json eppf_to_json(const EppfTable& p) {
  json values = json::array();
  for (const auto& [lam, v] : p.values) {
    values.push_back({{"partition", lam.parts},
                      {"p", rational_to_string(v)},
                      {"p_float", to_double(v)}});
  }
  return json{{"version", kFormatVersion},
              {"n_max", p.n_max},
              {"values", std::move(values)}};
}

std::string eppf_to_csv(const EppfTable& p) {
  std::ostringstream os;
  os << "# " << kFormatVersion << " eppf n=" << p.n_max << "\n";
  os << "partition,m,p_exact,p_float\n";
  for (const auto& [lam, v] : p.values)
    os << lam.to_string() << ',' << lam.n() << ',' << rational_to_string(v)
       << ',' << fmt_double(to_double(v)) << "\n";
  return os.str();
}

json empirical_to_json(const EmpiricalEppf& emp, const EppfTable* exact) {
  json cells = json::array();
  for (const auto& cell : emp.cells) {
    json c{{"shape", cell.shape.parts},
           {"count", cell.count},
           {"p_hat", cell.p_hat},
           {"stderr", cell.stderr_}};
    if (exact && exact->contains(cell.shape))
      c["p_exact"] = rational_to_string(exact->at(cell.shape));
    cells.push_back(std::move(c));
  }
  return json{{"version", kFormatVersion},
              {"n", emp.n},
              {"samples", emp.samples},
              {"seed", emp.seed},
              {"rng", RngStream::kAlgorithm},
              {"cells", std::move(cells)}};
}

std::string empirical_to_csv(const EmpiricalEppf& emp, const EppfTable* exact) {
  std::ostringstream os;
  os << "# " << kFormatVersion << " simulate n=" << emp.n
     << " samples=" << emp.samples << " seed=" << emp.seed << "\n";
  os << "shape,count,p_hat,stderr,p_exact\n";
  for (const auto& cell : emp.cells) {
    os << cell.shape.to_string() << ',' << cell.count << ','
       << fmt_double(cell.p_hat) << ',' << fmt_double(cell.stderr_) << ',';
    if (exact && exact->contains(cell.shape))
      os << rational_to_string(exact->at(cell.shape));
    os << "\n";
  }
  return os.str();
}

json set_partition_to_json(const SetPartition& sp) {
  json blocks = json::array();
  for (const auto& b : sp.blocks) blocks.push_back(b);
  return blocks;
}

json distribution_to_json(const Distribution& dist) {
  json items = json::array();
  for (const auto& [sp, p] : dist.mass)
    items.push_back({{"partition", set_partition_to_json(sp)},
                     {"p", rational_to_string(p)},
                     {"p_float", to_double(p)}});
  return json{{"version", kFormatVersion}, {"support", std::move(items)}};
}

json trajectory_to_json(const Trajectory& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    json blocks = json::array();
    for (const auto& b : e.blocks) blocks.push_back(b);
    events.push_back({{"t", e.time},
                      {"kind", e.is_merge ? "merge" : "freeze"},
                      {"blocks", std::move(blocks)}});
  }
  json freezing = json::array();
  for (double tau : t.freezing_times_by_element) freezing.push_back(tau);
  return json{{"version", kFormatVersion},
              {"n", t.n},
              {"complete", t.complete},
              {"events", std::move(events)},
              {"freezing_times", std::move(freezing)},
              {"tie_redraws", t.tie_redraws}};
}

json phi_ladder_to_json(const PhiLadder& ladder) {
  json phi = json::array();
  for (const auto& v : ladder.phi) phi.push_back(rational_to_string(v));
  json parts = json::array();
  for (const auto& row : ladder.parts) {
    json jrow = json::array();
    for (const auto& v : row) jrow.push_back(rational_to_string(v));
    parts.push_back(std::move(jrow));
  }
  return json{{"version", kFormatVersion},
              {"rho", rational_to_string(ladder.rho)},
              {"rho_zero_boundary", ladder.rho_zero_boundary},
              {"phi", std::move(phi)},
              {"phi_parts", std::move(parts)}};
}

json positivity_report_to_json(const PositivityReport& report) {
  json neg = json::array();
  for (auto [b, m] : report.negative_entries) neg.push_back({{"n", b}, {"m", m}});
  return json{{"version", kFormatVersion},
              {"valid", report.valid()},
              {"all_nonnegative", report.all_nonnegative},
              {"row_sums_ok", report.row_sums_ok},
              {"phi_positive", report.phi_positive},
              {"negative_entries", std::move(neg)},
              {"bad_row_sums", report.bad_row_sums},
              {"summary", report.summary()},
              {"ladder", phi_ladder_to_json(report.ladder)}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace coalfreeze
