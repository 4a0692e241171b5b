#include "nystrom/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "nystrom/linalg.hpp"

namespace nystrom {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ColumnSet draw(const SymmetricMatrix& a, SamplerMethod sampler, Index c, const ExperimentSpec& spec,
               const Vector& lev, std::uint64_t seed) {
  Rng rng(seed);
  switch (sampler) {
    case SamplerMethod::uniform: return uniform_sample(a.order(), c, rng);
    case SamplerMethod::adaptive: return adaptive_sample(a, ColumnSet{}, c, rng);
    case SamplerMethod::leverage: return leverage_sample_from_scores(lev, c, rng);
    case SamplerMethod::adaptive_full: return adaptive_full(a, c, rng);
    case SamplerMethod::uniform_adaptive2: {
      SamplerConfig cfg;
      cfg.method = SamplerMethod::uniform_adaptive2;
      cfg.k = spec.k;
      cfg.mu = spec.mu;
      cfg.budget = c;
      cfg.split = spec.split;
      cfg.seed = seed;
      return uniform_adaptive2(a, cfg, rng);
    }
  }
  throw ParameterError("unknown sampler");
}

bool is_modified(IntersectionMethod m) { return m != IntersectionMethod::standard; }

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double_field(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad number '" + std::string(s) + "'", line);
  return v;
}

std::uint64_t parse_u64_field(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad integer '" + std::string(s) + "'", line);
  return v;
}

const char* norm_name(NormKind k) { return k == NormKind::frobenius ? "frobenius" : "spectral"; }

}  // namespace

std::string MethodSpec::label() const {
  return std::string(to_string(sampler)) + ":" + std::string(to_string(intersection));
}

MethodSpec parse_method_spec(std::string_view s) {
  MethodSpec m;
  const auto colon = s.find(':');
  m.sampler = parse_sampler_method(s.substr(0, colon));
  if (colon != std::string_view::npos) m.intersection = parse_intersection_method(s.substr(colon + 1));
  return m;
}

void validate(const ExperimentSpec& spec, Index m) {
  if (spec.k < 1 || spec.k >= m) throw ParameterError("experiment: k must lie in [1, m)");
  if (spec.repeats < 1) throw ParameterError("experiment: repeats must be >= 1");
  if (spec.methods.empty()) throw ParameterError("experiment: no methods given");
  if (spec.c_values.empty()) throw ParameterError("experiment: no c values given");
  for (std::size_t i = 0; i < spec.c_values.size(); ++i) {
    const Index c = spec.c_values[i];
    if (c < 1 || c >= m) throw ParameterError("experiment: c = " + std::to_string(c) + " must lie in [1, m)");
    if (i > 0 && c <= spec.c_values[i - 1]) throw ParameterError("experiment: c values must ascend");
  }
  if (m > spec.dense_cap && !spec.allow_large) {
    throw ParameterError("experiment: dense order " + std::to_string(m) + " exceeds cap " +
                         std::to_string(spec.dense_cap) + "; pass the override to proceed");
  }
}

std::vector<CellAggregate> aggregate(const std::vector<TrialRecord>& records) {
  std::vector<CellAggregate> out;
  std::map<std::pair<std::string, Index>, std::vector<const TrialRecord*>> cells;
  std::vector<std::pair<std::string, Index>> order;
  for (const auto& r : records) {
    auto key = std::make_pair(r.method, r.c);
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  for (const auto& key : order) {
    const auto& recs = cells[key];
    CellAggregate a;
    a.method = key.first;
    a.c = key.second;
    a.trials = recs.size();
    a.min_ratio = std::numeric_limits<double>::infinity();
    double sum = 0.0, sum_s = 0.0, sum_i = 0.0;
    for (const auto* r : recs) {
      a.min_ratio = std::min(a.min_ratio, r->error_ratio);
      sum += r->error_ratio;
      sum_s += r->sampling_seconds;
      sum_i += r->intersection_seconds;
      a.fallbacks += r->fallback ? 1 : 0;
    }
    const double n = static_cast<double>(recs.size());
    a.mean_ratio = sum / n;
    double var = 0.0;
    for (const auto* r : recs) var += (r->error_ratio - a.mean_ratio) * (r->error_ratio - a.mean_ratio);
    a.stdev_ratio = recs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    a.mean_sampling_s = sum_s / n;
    a.mean_intersection_s = sum_i / n;
    out.push_back(a);
  }
  return out;
}

ResultTable run_sweep(const SymmetricMatrix& a, const ExperimentSpec& spec) {
  const Index m = a.order();
  validate(spec, m);
  const SymmetricInput input = std::cref(a);

  ResultTable table;
  table.spec = spec;

  const double reference = reference_error(input, spec.k, spec.norm);
  const double a_norm = norm(a.dense(), spec.norm);
  Vector lev;
  if (std::any_of(spec.methods.begin(), spec.methods.end(),
                  [](const MethodSpec& ms) { return ms.sampler == SamplerMethod::leverage; })) {
    lev = leverage_scores(a.dense(), spec.k);
  }

  // Samplers in order of first appearance, each with its intersections.
  std::vector<std::pair<SamplerMethod, std::vector<IntersectionMethod>>> groups;
  for (const auto& ms : spec.methods) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == ms.sampler; });
    if (it == groups.end()) {
      groups.push_back({ms.sampler, {}});
      it = groups.end() - 1;
    }
    if (std::find(it->second.begin(), it->second.end(), ms.intersection) == it->second.end()) {
      it->second.push_back(ms.intersection);
    }
  }

  const std::size_t t = static_cast<std::size_t>(spec.repeats);
  for (const Index c : spec.c_values) {
    // records[(sampler, intersection)][trial]
    std::map<std::string, std::vector<TrialRecord>> cell;
    for (const auto& [sampler, intersections] : groups) {
      std::vector<std::vector<TrialRecord>> per_trial(t);
      std::vector<std::pair<double, double>> dominance(t, {0.0, 0.0});
      std::vector<std::exception_ptr> errors(t);

#pragma omp parallel for schedule(dynamic)
      for (std::size_t trial = 0; trial < t; ++trial) {
        try {
          const std::uint64_t seed = spec.base_seed + trial;
          const auto t0 = Clock::now();
          const ColumnSet cols = draw(a, sampler, c, spec, lev, seed);
          const double sampling = seconds_since(t0);

          std::map<IntersectionMethod, double> residuals;
          for (const auto method : intersections) {
            const auto t1 = Clock::now();
            NystromApproximation approx = approximate(input, cols, method);
            const double intersection = seconds_since(t1);
            const double res = residual_norm(input, approx, spec.norm);
            residuals[method] = res;
            const ErrorRatio ratio = error_ratio(res, reference, a_norm);

            TrialRecord rec;
            rec.method = MethodSpec{sampler, method}.label();
            rec.c = c;
            rec.trial = static_cast<Index>(trial);
            rec.seed = seed;
            rec.error_ratio = ratio.value;
            rec.degenerate = ratio.degenerate;
            rec.sampling_seconds = spec.zero_timings ? 0.0 : sampling;
            rec.intersection_seconds = spec.zero_timings ? 0.0 : intersection;
            rec.fallback = approx.fallback;
            per_trial[trial].push_back(std::move(rec));
          }

          // Dominance on this C, computing whichever side the spec left out.
          auto residual_for = [&](IntersectionMethod method) {
            if (auto it = residuals.find(method); it != residuals.end()) return it->second;
            return residual_norm(input, approximate(input, cols, method), NormKind::frobenius);
          };
          double modified = 0.0;
          if (auto it = std::find_if(residuals.begin(), residuals.end(),
                                     [](const auto& kv) { return is_modified(kv.first); });
              it != residuals.end() && spec.norm == NormKind::frobenius) {
            modified = it->second;
          } else {
            modified = residual_norm(input, approximate(input, cols, IntersectionMethod::modified_naive),
                                     NormKind::frobenius);
          }
          const double standard = spec.norm == NormKind::frobenius
                                      ? residual_for(IntersectionMethod::standard)
                                      : residual_norm(input, approximate(input, cols, IntersectionMethod::standard),
                                                      NormKind::frobenius);
          dominance[trial] = {modified, standard};
        } catch (...) {
          errors[trial] = std::current_exception();
        }
      }
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

      for (std::size_t trial = 0; trial < t; ++trial) {
        const auto [modified, standard] = dominance[trial];
        ++table.dominance_checks;
        if (modified > standard + 1e-10 * std::max(1.0, standard)) {
          ++table.dominance_violations;
          spdlog::warn("dominance violated: sampler {} c {} trial {}: modified {} > standard {}",
                       to_string(sampler), c, trial, modified, standard);
        }
        for (auto& rec : per_trial[trial]) cell[rec.method].push_back(std::move(rec));
      }
    }
    // Report order follows the spec's method list.
    for (const auto& ms : spec.methods) {
      auto it = cell.find(ms.label());
      if (it == cell.end()) continue;
      for (auto& rec : it->second) table.records.push_back(std::move(rec));
      cell.erase(it);
    }
  }
  table.aggregates = aggregate(table.records);
  return table;
}

TimingReport run_timing_comparison(SymmetricInput a, Index c, Index repeats, std::uint64_t seed) {
  const Index m = std::visit([](const auto& r) { return r.get().order(); }, a);
  if (c < 1 || c >= m) throw ParameterError("timing: c must lie in [1, m)");
  if (repeats < 1) throw ParameterError("timing: repeats must be >= 1");

  TimingReport report;
  report.m = m;
  report.c = c;
  report.seed = seed;
  if (const auto* sp = std::get_if<std::reference_wrapper<const SparseSymmetric>>(&a)) {
    report.sparse = true;
    report.nnz = sp->get().nnz();
  }
  Rng rng(seed);
  const ColumnSet cols = uniform_sample(m, c, rng);

  DenseMatrix u_naive, u_fast;
  for (const auto method :
       {IntersectionMethod::standard, IntersectionMethod::modified_naive, IntersectionMethod::modified_fast}) {
    TimingEntry entry{method, {}, 0.0, 0.0};
    for (Index r = 0; r < repeats; ++r) {
      const auto t0 = Clock::now();
      const NystromApproximation approx = approximate(a, cols, method);
      entry.seconds.push_back(seconds_since(t0));
      if (r == 0) {
        if (method == IntersectionMethod::modified_naive) u_naive = approx.u.dense();
        if (method == IntersectionMethod::modified_fast) {
          u_fast = approx.u.dense();
          report.fallback = approx.fallback;
        }
      }
    }
    entry.mean_s = std::accumulate(entry.seconds.begin(), entry.seconds.end(), 0.0) /
                   static_cast<double>(entry.seconds.size());
    std::vector<double> sorted = entry.seconds;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    entry.median_s = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    report.entries.push_back(std::move(entry));
  }
  const double scale = u_naive.norm();
  report.fast_naive_rel_diff = (u_fast - u_naive).norm() / (scale > 0.0 ? scale : 1.0);
  report.speedup = report.entries[1].mean_s / std::max(report.entries[2].mean_s, 1e-12);
  return report;
}

namespace report {

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.c << ',' << r.trial << ',' << r.seed << ',' << fmt_double(r.error_ratio) << ','
        << (r.degenerate ? 1 : 0) << ',' << fmt_double(r.sampling_seconds) << ','
        << fmt_double(r.intersection_seconds) << ',' << (r.fallback ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<TrialRecord> parse_csv(std::string_view text) {
  std::vector<TrialRecord> out;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw FormatError("unexpected CSV header", lineno);
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 9) throw FormatError("expected 9 fields", lineno);
    TrialRecord r;
    r.method = std::string(f[0]);
    r.c = static_cast<Index>(parse_u64_field(f[1], lineno));
    r.trial = static_cast<Index>(parse_u64_field(f[2], lineno));
    r.seed = parse_u64_field(f[3], lineno);
    r.error_ratio = parse_double_field(f[4], lineno);
    r.degenerate = parse_u64_field(f[5], lineno) != 0;
    r.sampling_seconds = parse_double_field(f[6], lineno);
    r.intersection_seconds = parse_double_field(f[7], lineno);
    r.fallback = parse_u64_field(f[8], lineno) != 0;
    out.push_back(std::move(r));
  }
  if (!header_seen) throw FormatError("missing CSV header");
  return out;
}

std::string to_json(const ResultTable& table) {
  using json = nlohmann::ordered_json;
  const auto& s = table.spec;
  json spec = {{"input", s.input},
               {"k", s.k},
               {"c_values", s.c_values},
               {"repeats", s.repeats},
               {"base_seed", s.base_seed},
               {"norm", norm_name(s.norm)},
               {"mu", s.mu},
               {"split", s.split},
               {"zero_timings", s.zero_timings}};
  json methods = json::array();
  for (const auto& m : s.methods) methods.push_back(m.label());
  spec["methods"] = methods;

  json records = json::array();
  for (const auto& r : table.records) {
    records.push_back({{"method", r.method},
                       {"c", r.c},
                       {"trial", r.trial},
                       {"seed", r.seed},
                       {"error_ratio", r.error_ratio},
                       {"degenerate", r.degenerate},
                       {"sampling_s", r.sampling_seconds},
                       {"intersection_s", r.intersection_seconds},
                       {"fallback", r.fallback}});
  }
  json aggregates = json::array();
  for (const auto& a : table.aggregates) {
    aggregates.push_back({{"method", a.method},
                          {"c", a.c},
                          {"trials", a.trials},
                          {"min_ratio", a.min_ratio},
                          {"mean_ratio", a.mean_ratio},
                          {"stdev_ratio", a.stdev_ratio},
                          {"mean_sampling_s", a.mean_sampling_s},
                          {"mean_intersection_s", a.mean_intersection_s},
                          {"fallbacks", a.fallbacks}});
  }
  json doc = {{"spec", spec},
              {"records", records},
              {"aggregates", aggregates},
              {"dominance", {{"checks", table.dominance_checks}, {"violations", table.dominance_violations}}}};
  return doc.dump(2) + "\n";
}

ResultTable parse_json(std::string_view text) {
  using json = nlohmann::ordered_json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad JSON report: ") + e.what());
  }
  ResultTable t;
  try {
    const auto& s = doc.at("spec");
    t.spec.input = s.at("input").get<std::string>();
    t.spec.k = s.at("k").get<Index>();
    t.spec.c_values = s.at("c_values").get<std::vector<Index>>();
    t.spec.repeats = s.at("repeats").get<Index>();
    t.spec.base_seed = s.at("base_seed").get<std::uint64_t>();
    t.spec.norm = s.at("norm").get<std::string>() == "spectral" ? NormKind::spectral : NormKind::frobenius;
    t.spec.mu = s.at("mu").get<double>();
    t.spec.split = s.at("split").get<std::array<double, 3>>();
    t.spec.zero_timings = s.at("zero_timings").get<bool>();
    for (const auto& m : s.at("methods")) t.spec.methods.push_back(parse_method_spec(m.get<std::string>()));
    for (const auto& r : doc.at("records")) {
      TrialRecord rec;
      rec.method = r.at("method").get<std::string>();
      rec.c = r.at("c").get<Index>();
      rec.trial = r.at("trial").get<Index>();
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.error_ratio = r.at("error_ratio").get<double>();
      rec.degenerate = r.at("degenerate").get<bool>();
      rec.sampling_seconds = r.at("sampling_s").get<double>();
      rec.intersection_seconds = r.at("intersection_s").get<double>();
      rec.fallback = r.at("fallback").get<bool>();
      t.records.push_back(std::move(rec));
    }
    t.dominance_checks = doc.at("dominance").at("checks").get<std::size_t>();
    t.dominance_violations = doc.at("dominance").at("violations").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON report: ") + e.what());
  }
  t.aggregates = aggregate(t.records);
  return t;
}

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void chart(std::ostringstream& out, double ox, double oy, double w, double h, const std::string& title,
           const std::string& ylabel, const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 50.0;
  auto px = [&](double x) { return ox + pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad); };
  auto py = [&](double y) { return oy + h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad); };

  out << "<g>\n";
  out << "<text x=\"" << ox + w / 2 << "\" y=\"" << oy + 20 << "\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  out << "<line x1=\"" << ox + pad << "\" y1=\"" << oy + h - pad << "\" x2=\"" << ox + w - pad << "\" y2=\""
      << oy + h - pad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ox + pad << "\" y1=\"" << oy + pad << "\" x2=\"" << ox + pad << "\" y2=\"" << oy + h - pad
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ox + w / 2 << "\" y=\"" << oy + h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">c</text>\n";
  out << "<text x=\"" << ox + 14 << "\" y=\"" << oy + h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 "
      << ox + 14 << ' ' << oy + h / 2 << ")\" text-anchor=\"middle\">" << xml_escape(ylabel) << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double yv = ymin + (ymax - ymin) * tick / 4.0;
    out << "<text x=\"" << ox + pad - 4 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
        << fmt_double(std::round(yv * 1e4) / 1e4) << "</text>\n";
    const double xv = xmin + (xmax - xmin) * tick / 4.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << oy + h - pad + 14 << "\" text-anchor=\"middle\" font-size=\"10\">"
        << fmt_double(std::round(xv * 100) / 100) << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[i].points) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : series[i].points) {
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    }
    out << "<text x=\"" << ox + w - pad - 4 << "\" y=\"" << oy + pad + 14.0 * static_cast<double>(i)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colour << "\">" << xml_escape(series[i].name)
        << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string to_svg(const ResultTable& table) {
  std::vector<Series> ratio, time;
  for (const auto& a : table.aggregates) {
    auto find = [&](std::vector<Series>& v) -> Series& {
      for (auto& s : v)
        if (s.name == a.method) return s;
      v.push_back(Series{a.method, {}});
      return v.back();
    };
    find(ratio).points.emplace_back(static_cast<double>(a.c), a.min_ratio);
    find(time).points.emplace_back(static_cast<double>(a.c), a.mean_sampling_s + a.mean_intersection_s);
  }
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"400\" viewBox=\"0 0 1000 400\">\n";
  out << "<rect width=\"1000\" height=\"400\" fill=\"white\"/>\n";
  chart(out, 0, 0, 500, 400, "min error ratio (k = " + std::to_string(table.spec.k) + ")", "error ratio", ratio);
  chart(out, 500, 0, 500, 400, "mean time per trial", "seconds", time);
  out << "</svg>\n";
  return out.str();
}

std::string timing_to_json(const TimingReport& r) {
  using json = nlohmann::ordered_json;
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"method", std::string(to_string(e.method))},
                       {"seconds", e.seconds},
                       {"mean_s", e.mean_s},
                       {"median_s", e.median_s}});
  }
  json doc = {{"m", r.m},
              {"c", r.c},
              {"sparse", r.sparse},
              {"nnz", r.nnz},
              {"seed", r.seed},
              {"entries", entries},
              {"fast_naive_rel_diff", r.fast_naive_rel_diff},
              {"fallback", r.fallback},
              {"speedup_naive_over_fast", r.speedup}};
  return doc.dump(2) + "\n";
}

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "svg") return Format::svg;
  throw ParameterError("unknown report format '" + std::string(s) + "'");
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void emit(const ResultTable& table, Format format, const std::filesystem::path& path) {
  switch (format) {
    case Format::csv: return write_text(path, to_csv(table.records));
    case Format::json: return write_text(path, to_json(table));
    case Format::svg: return write_text(path, to_svg(table));
  }
}

}  // namespace report
}  // namespace nystrom
