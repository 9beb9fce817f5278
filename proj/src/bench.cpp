#include "sobolev/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "sobolev/problems.hpp"

namespace sobolev {

SigmaRule solver_rule(std::string_view solver, double M) {
  if (solver == "esymbs") return SigmaRule::geometric(M);
  if (solver == "esymbp") return SigmaRule::eta_xi(M);
  if (solver == "symb") return SigmaRule::fixed(0.0);
  throw UnknownSolverError(std::string(solver));
}

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names = {"esymbs", "esymbp", "symb"};
  return names;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t permutation_seed(std::uint64_t base_seed, std::string_view problem, int n, int perm_index) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : problem) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  h = splitmix64(h ^ base_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  return splitmix64(h ^ static_cast<std::uint64_t>(perm_index));
}

std::vector<RunRecord> run_suite(const SuiteSpec& spec) {
  if (spec.perms < 1) throw std::invalid_argument("run_suite: need at least one permutation");
  for (const auto& s : spec.solvers) (void)solver_rule(s);
  for (const auto& p : spec.problems) {
    for (int n : spec.dims) {
      (void)instantiate(p, n);
      spec.config.validate(n);
    }
  }

  struct Task {
    std::string solver;
    std::string problem;
    int n;
    int perm;
  };
  std::vector<Task> tasks;
  for (const auto& s : spec.solvers) {
    for (const auto& p : spec.problems) {
      for (int n : spec.dims) {
        for (int k = 0; k < spec.perms; ++k) tasks.push_back({s, p, n, k});
      }
    }
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    return std::tie(a.solver, a.problem, a.n, a.perm) < std::tie(b.solver, b.problem, b.n, b.perm);
  });
  tasks.erase(std::unique(tasks.begin(), tasks.end(),
                          [](const Task& a, const Task& b) {
                            return std::tie(a.solver, a.problem, a.n, a.perm) ==
                                   std::tie(b.solver, b.problem, b.n, b.perm);
                          }),
              tasks.end());

  std::vector<RunRecord> records(tasks.size());
  auto run_one = [&](std::size_t i) {
    const Task& t = tasks[i];
    RunRecord& rec = records[i];
    rec.solver = t.solver;
    rec.problem = t.problem;
    rec.n = t.n;
    rec.perm_index = t.perm;
    rec.seed = permutation_seed(spec.base_seed, t.problem, t.n, t.perm);
    rec.rhoend = spec.config.rhoend;

    const ProblemDef problem = permute_problem(instantiate(t.problem, t.n), random_permutation(t.n, rec.seed));
    SolverConfig config = spec.config;
    config.sigma_rule = solver_rule(t.solver, spec.config.sigma_rule.M);
    int calls = 0;
    const Objective counted = [&](const Vector& x) {
      ++calls;
      return problem.objective(x);
    };
    try {
      const SolverReport report = minimize(counted, problem.start, config);
      rec.nf = report.nf;
      rec.fbest = report.best_value;
      rec.status = report.status;
    } catch (const std::exception&) {
      rec.nf = calls;
      rec.fbest = std::numeric_limits<double>::infinity();
      rec.status = SolverStatus::error;
    }
  };

  unsigned threads = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) run_one(i);
    });
  }
  for (auto& th : pool) th.join();
  return records;
}

StatSummary summarize(const std::vector<int>& nf_values) {
  if (nf_values.empty()) throw std::invalid_argument("summarize: empty sample");
  const auto count = static_cast<double>(nf_values.size());
  double sum = 0.0;
  for (int v : nf_values) sum += v;
  const double mean = sum / count;
  double ss = 0.0;
  for (int v : nf_values) ss += (v - mean) * (v - mean);
  const double std = std::sqrt(ss / count);
  return {mean, std, mean > 0.0 ? std / mean : 0.0, nf_values.size()};
}

double ProfileCurve::at(double tau) const {
  double value = 0.0;
  for (const auto& [t, frac] : breakpoints) {
    if (t > tau) break;
    value = frac;
  }
  return value;
}

std::vector<ProfileCurve> performance_profile(const CostMatrix& costs, const std::vector<std::string>& solvers) {
  if (costs.empty() || solvers.empty()) throw std::invalid_argument("performance_profile: empty cost matrix");
  const std::size_t num_solvers = solvers.size();
  for (const auto& row : costs) {
    if (row.size() != num_solvers) throw std::invalid_argument("performance_profile: ragged cost matrix");
    for (const auto& c : row) {
      if (c && !(*c >= 0.0)) throw std::invalid_argument("performance_profile: costs must be nonnegative");
    }
  }

  const double num_problems = static_cast<double>(costs.size());
  std::vector<std::vector<double>> ratios(num_solvers);
  for (const auto& row : costs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : row) {
      if (c) best = std::min(best, std::max(*c, kCostFloor));
    }
    if (!std::isfinite(best)) continue;  // every solver failed: infinite ratio for all
    for (std::size_t s = 0; s < num_solvers; ++s) {
      if (row[s]) ratios[s].push_back(std::max(*row[s], kCostFloor) / best);
    }
  }

  std::vector<ProfileCurve> curves;
  for (std::size_t s = 0; s < num_solvers; ++s) {
    auto& r = ratios[s];
    std::sort(r.begin(), r.end());
    ProfileCurve curve{solvers[s], {}};
    const auto at_one = std::upper_bound(r.begin(), r.end(), 1.0) - r.begin();
    curve.breakpoints.emplace_back(1.0, static_cast<double>(at_one) / num_problems);
    for (auto k = static_cast<std::size_t>(at_one); k < r.size(); ++k) {
      if (k + 1 < r.size() && r[k + 1] == r[k]) continue;
      curve.breakpoints.emplace_back(r[k], static_cast<double>(k + 1) / num_problems);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

ProfileMetric parse_metric(std::string_view name) {
  if (name == "mean") return ProfileMetric::mean;
  if (name == "rstd") return ProfileMetric::rstd;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "' (expected mean or rstd)");
}

bool run_solved(const RunRecord& record) {
  if (record.status != SolverStatus::converged && record.status != SolverStatus::stalled) return false;
  std::optional<double> fmin;
  try {
    fmin = instantiate(record.problem, record.n).known_fmin;
  } catch (const std::invalid_argument&) {
    fmin.reset();
  }
  if (!fmin) return record.status == SolverStatus::converged;
  return record.fbest <= *fmin + std::max(1e-6, 1e-4 * std::abs(*fmin));
}

ProfileTable build_cost_table(const std::vector<RunRecord>& records, ProfileMetric metric) {
  using InstanceKey = std::tuple<std::string, int, double>;
  std::map<InstanceKey, std::map<std::string, std::vector<const RunRecord*>>> grouped;
  std::vector<std::string> solvers;
  for (const auto& r : records) {
    grouped[{r.problem, r.n, r.rhoend}][r.solver].push_back(&r);
    if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end()) solvers.push_back(r.solver);
  }
  std::sort(solvers.begin(), solvers.end());

  ProfileTable table;
  table.solvers = solvers;
  for (const auto& [key, by_solver] : grouped) {
    char label[64];
    std::snprintf(label, sizeof label, "/%d/%g", std::get<1>(key), std::get<2>(key));
    table.instances.push_back(std::get<0>(key) + label);
    std::vector<std::optional<double>> row;
    for (const auto& s : solvers) {
      const auto it = by_solver.find(s);
      if (it == by_solver.end()) {
        row.emplace_back();
        continue;
      }
      std::vector<int> nfs;
      bool solved = true;
      for (const RunRecord* r : it->second) {
        solved = solved && run_solved(*r);
        nfs.push_back(r->nf);
      }
      if (!solved) {
        row.emplace_back();
        continue;
      }
      const StatSummary st = summarize(nfs);
      row.emplace_back(metric == ProfileMetric::mean ? st.mean : st.rstd);
    }
    table.costs.push_back(std::move(row));
  }
  return table;
}

void emit_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    for (const auto* field : {&r.solver, &r.problem}) {
      if (field->find_first_of(",\r\n") != std::string::npos) {
        throw CsvError("field '" + *field + "' cannot be written to CSV");
      }
    }
    out << r.solver << ',' << r.problem << ',' << r.n << ',' << r.perm_index << ',' << r.seed << ','
        << format_double(r.rhoend) << ',' << r.nf << ',' << format_double(r.fbest) << ',' << to_string(r.status)
        << '\n';
  }
}

std::string emit_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  emit_csv(out, records);
  return out.str();
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* name) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw CsvError("line " + std::to_string(line) + ": bad " + name + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<RunRecord> parse_csv(std::istream& in) {
  std::vector<RunRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kRecordHeader) throw CsvError("line " + std::to_string(line_no) + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 9) {
      throw CsvError("line " + std::to_string(line_no) + ": expected 9 fields, got " + std::to_string(f.size()));
    }
    RunRecord r;
    r.solver = std::string(f[0]);
    r.problem = std::string(f[1]);
    r.n = parse_field<int>(f[2], line_no, "n");
    r.perm_index = parse_field<int>(f[3], line_no, "perm");
    r.seed = parse_field<std::uint64_t>(f[4], line_no, "seed");
    r.rhoend = parse_field<double>(f[5], line_no, "rhoend");
    r.nf = parse_field<int>(f[6], line_no, "nf");
    r.fbest = parse_field<double>(f[7], line_no, "fbest");
    try {
      r.status = parse_status(f[8]);
    } catch (const std::invalid_argument&) {
      throw CsvError("line " + std::to_string(line_no) + ": bad status '" + std::string(f[8]) + "'");
    }
    if (r.solver.empty() || r.problem.empty()) throw CsvError("line " + std::to_string(line_no) + ": empty name");
    records.push_back(std::move(r));
  }
  if (!header_seen) throw CsvError("line 1: missing header");
  return records;
}

std::vector<RunRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

namespace {

double max_finite_tau(const std::vector<ProfileCurve>& curves) {
  double tau_max = 1.0;
  for (const auto& c : curves) {
    for (const auto& [tau, frac] : c.breakpoints) tau_max = std::max(tau_max, tau);
  }
  return tau_max;
}

}  // namespace

void emit_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves) {
  const double tau_max = max_finite_tau(curves);
  out << "solver,tau,rho\n";
  for (const auto& c : curves) {
    for (const auto& [tau, frac] : c.breakpoints) {
      out << c.solver << ',' << format_double(tau) << ',' << format_double(frac) << '\n';
    }
    if (!c.breakpoints.empty() && c.breakpoints.back().first < tau_max) {
      out << c.solver << ',' << format_double(tau_max) << ',' << format_double(c.breakpoints.back().second) << '\n';
    }
  }
}

void emit_profile_svg(std::ostream& out, const std::vector<ProfileCurve>& curves, std::string_view title) {
  constexpr double width = 640, height = 420, left = 60, right = 20, top = 40, bottom = 50;
  constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double tau_max = max_finite_tau(curves);
  if (tau_max <= 1.0) tau_max = 2.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double tau) { return left + (std::min(tau, tau_max) - 1.0) / (tau_max - 1.0) * plot_w; };
  auto py = [&](double rho) { return top + (1.0 - rho) * plot_h; };
  char buf[256];

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                plot_w, plot_h);
  out << buf;
  for (int k = 0; k <= 4; ++k) {
    const double rho = k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">%g</text>\n",
                  left - 6, py(rho) + 4, rho);
    out << buf;
    const double tau = 1.0 + k * (tau_max - 1.0) / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  px(tau), top + plot_h + 16, tau);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">tau</text>\n",
                left + plot_w / 2, height - 10);
  out << buf;

  std::size_t idx = 0;
  for (const auto& c : curves) {
    const char* color = colors[idx % std::size(colors)];
    out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << color << "\" points=\"";
    double prev = 0.0;
    for (const auto& [tau, frac] : c.breakpoints) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f %.2f,%.2f ", px(tau), py(prev), px(tau), py(frac));
      out << buf;
      prev = frac;
    }
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(tau_max), py(prev));
    out << buf << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" fill=\"%s\">",
                  left + plot_w - 90, top + plot_h - 12.0 - 16.0 * static_cast<double>(idx), color);
    out << buf << c.solver << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace sobolev
