#include "brainschema/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <unistd.h>

#include "brainschema/codec.hpp"
#include "brainschema/triple_io.hpp"

namespace fs = std::filesystem;

namespace brainschema {
namespace {

double or_nan(const std::optional<double>& v) {
  return v.value_or(std::numeric_limits<double>::quiet_NaN());
}

/// Removes a scratch directory on scope exit.
class ScratchDir {
 public:
  explicit ScratchDir(fs::path path) : path_(std::move(path)) {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

fs::path default_work_dir() {
  std::random_device rd;
  return fs::temp_directory_path() /
         ("brainschema-bench-" + std::to_string(::getpid()) + "-" + std::to_string(rd() % 1000000));
}

std::string num(double v) { return format_double(v); }

std::string short_rate(double v) {
  std::ostringstream os;
  os.precision(3);
  if (v >= 1e6) {
    os << v / 1e6 << "M";
  } else if (v >= 1e3) {
    os << v / 1e3 << "k";
  } else {
    os << v;
  }
  return os.str();
}

double nice_step(double span, int target_ticks) {
  if (span <= 0.0) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Series {
  std::string name;
  std::string color;
  std::string dash;
  std::vector<std::pair<double, double>> points;  // (workers, rate)
};

}  // namespace

BenchPlan BenchPlan::paper_preset() {
  BenchPlan p;
  p.entry_counts = {50'000'000, 100'000'000, 500'000'000};
  p.worker_counts = {1, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  return p;
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::memory ? "memory" : "durable";
}

void validate_plan(const BenchPlan& plan) {
  if (plan.entry_counts.empty()) throw ConfigError("entry_counts", "must not be empty");
  if (plan.worker_counts.empty()) throw ConfigError("worker_counts", "must not be empty");
  for (count_t e : plan.entry_counts) {
    if (e == 0) throw ConfigError("entry_counts", "entries must be at least 1");
  }
  for (count_t w : plan.worker_counts) {
    if (w == 0) throw ConfigError("worker_counts", "workers must be at least 1");
  }
  if (plan.trials == 0) throw ConfigError("trials", "must be at least 1");
  if (plan.batch_size == 0) throw ConfigError("batch_size", "must be at least 1");
  if (plan.max_block_entries == 0) throw ConfigError("max_block_entries", "must be at least 1");
  if (plan.block_dim == 0) throw ConfigError("block_dim", "must be at least 1");
  require_valid(validate_config(plan.schema));
}

std::vector<BenchResultRow> run_sweep(const BenchPlan& plan, const SweepProgress& progress) {
  validate_plan(plan);
  const Schema schema(plan.schema);
  const fs::path base = plan.work_dir.empty() ? default_work_dir() : plan.work_dir;

  std::vector<BenchResultRow> rows;
  rows.reserve(plan.cells());
  try {
    for (count_t entries : plan.entry_counts) {
      const auto blocks =
          plan_blocks(entries, plan.block_dim, plan.max_block_entries, plan.seed, schema);
      for (count_t workers : plan.worker_counts) {
        for (count_t trial = 1; trial <= plan.trials; ++trial) {
          IngestMetrics m;
          if (plan.backend == Backend::memory) {
            MemoryStore store;
            m = run_ingest(blocks, schema, workers, plan.batch_size, store);
          } else {
            ScratchDir dir(base / "cell");
            DurableStore store(dir.path());
            m = run_ingest(blocks, schema, workers, plan.batch_size, store);
          }
          BenchResultRow row{entries,          workers,          trial,
                             or_nan(m.for_rate), or_nan(m.load_rate), or_nan(m.ingest_rate),
                             m.wall_seconds};
          rows.push_back(row);
          if (progress) progress(row, m);
        }
      }
    }
  } catch (const std::exception& e) {
    std::error_code ec;
    if (plan.work_dir.empty()) fs::remove_all(base, ec);
    throw SweepError(std::string("sweep stopped after ") + std::to_string(rows.size()) +
                         " cells: " + e.what(),
                     std::move(rows));
  }
  std::error_code ec;
  if (plan.work_dir.empty()) fs::remove_all(base, ec);
  return rows;
}

std::string emit_csv(const std::vector<BenchResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.entries) + ',' + std::to_string(r.workers) + ',' +
           std::to_string(r.trial) + ',' + num(r.for_rate) + ',' + num(r.load_rate) + ',' +
           num(r.ingest_rate) + ',' + num(r.total_seconds) + '\n';
  }
  return out;
}

std::vector<BenchResultRow> parse_csv(std::string_view text) {
  std::vector<BenchResultRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader) throw FormatError(1, "unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 7) throw FormatError(line_no, "expected 7 fields, got " + std::to_string(f.size()));
    const auto integer = [&](std::string_view s) {
      count_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(line_no, "bad integer '" + std::string(s) + "'");
      }
      return v;
    };
    const auto real = [&](std::string_view s) {
      try {
        return parse_double(s);
      } catch (const FormatError&) {
        throw FormatError(line_no, "bad number '" + std::string(s) + "'");
      }
    };
    rows.push_back({integer(f[0]), integer(f[1]), integer(f[2]), real(f[3]), real(f[4]), real(f[5]),
                    real(f[6])});
  }
  if (line_no == 0) throw FormatError(1, "missing CSV header");
  return rows;
}

std::vector<RatePoint> mean_rates_by_workers(const std::vector<BenchResultRow>& rows) {
  struct Acc {
    double f = 0, l = 0, i = 0;
    count_t n = 0;
  };
  std::map<count_t, Acc> acc;
  for (const auto& r : rows) {
    auto& a = acc[r.workers];
    a.f += r.for_rate;
    a.l += r.load_rate;
    a.i += r.ingest_rate;
    ++a.n;
  }
  std::vector<RatePoint> out;
  for (const auto& [w, a] : acc) {
    const auto n = static_cast<double>(a.n);
    out.push_back({w, a.f / n, a.l / n, a.i / n});
  }
  return out;
}

std::string emit_plot(const std::vector<BenchResultRow>& rows, const PlotOptions& options) {
  if (rows.empty()) throw Error("plot: no result rows to plot");

  static const char* kColors[3] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  static const char* kPhases[3] = {"for", "load", "ingest"};
  static const char* kDashes[] = {"", "6,3", "2,3", "8,3,2,3"};

  std::vector<Series> series;
  const auto add_group = [&](const std::vector<BenchResultRow>& subset, const std::string& suffix,
                             const std::string& dash) {
    const auto means = mean_rates_by_workers(subset);
    for (int p = 0; p < 3; ++p) {
      Series s{std::string(kPhases[p]) + " rate" + suffix, kColors[p], dash, {}};
      for (const auto& m : means) {
        const double v = p == 0 ? m.for_rate : p == 1 ? m.load_rate : m.ingest_rate;
        s.points.emplace_back(static_cast<double>(m.workers), v);
      }
      series.push_back(std::move(s));
    }
  };
  if (options.per_entry_count) {
    std::map<count_t, std::vector<BenchResultRow>> by_entries;
    for (const auto& r : rows) by_entries[r.entries].push_back(r);
    std::size_t k = 0;
    for (const auto& [entries, subset] : by_entries) {
      add_group(subset, " (" + std::to_string(entries) + " entries)", kDashes[k++ % 4]);
    }
  } else {
    add_group(rows, "", "");
  }

  double x_min = series[0].points.front().first;
  double x_max = series[0].points.back().first;
  double y_max = 0.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      if (std::isfinite(y)) y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  const double y_step = nice_step(y_max > 0.0 ? y_max : 1.0, 5);
  const double y_top = y_step * std::ceil((y_max > 0.0 ? y_max : 1.0) / y_step);

  const double width = 760, height = 460;
  const double left = 90, right = 220, top = 50, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return top + plot_h - y / y_top * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left + plot_w / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
      << "Average for, load, and ingest rates per number of workers</text>\n";

  // Axes, ticks and grid.
  svg << "<g class=\"axes\" stroke=\"black\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\"/>\n</g>\n";
  svg << "<g class=\"ticks\">\n";
  for (double y = 0.0; y <= y_top + y_step / 2; y += y_step) {
    svg << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\"" << left + plot_w << "\" y2=\""
        << py(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
        << short_rate(y) << "</text>\n";
  }
  for (const auto& [x, y] : series[0].points) {
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(x) << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(x) << "\" y=\"" << top + plot_h + 20 << "\" text-anchor=\"middle\">" << x
        << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\">workers</text>\n"
      << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\">entries per second</text>\n";

  for (const auto& s : series) {
    svg << "<g class=\"series\" data-name=\"" << xml_escape(s.name) << "\">\n<polyline fill=\"none\" stroke=\""
        << s.color << "\" stroke-width=\"2\"";
    if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << '"';
    svg << " points=\"";
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (!first) svg << ' ';
      first = false;
      svg << px(x) << ',' << (std::isfinite(y) ? py(y) : py(0.0));
    }
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << (std::isfinite(y) ? py(y) : py(0.0))
          << "\" r=\"3.5\" fill=\"" << s.color << "\"><title>" << xml_escape(s.name) << " @ " << x
          << " workers: " << num(y) << "</title></circle>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"legend\">\n";
  double ly = top + 10;
  for (const auto& s : series) {
    const double lx = left + plot_w + 20;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << '"';
    svg << "/>\n<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.name) << "</text>\n";
    ly += 18;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::vector<SmokeCheck> smoke_checks(const std::vector<BenchResultRow>& rows,
                                     unsigned hardware_threads) {
  std::vector<SmokeCheck> checks;
  const auto means = mean_rates_by_workers(rows);
  const auto at = [&](count_t w) -> const RatePoint* {
    for (const auto& m : means) {
      if (m.workers == w) return &m;
    }
    return nullptr;
  };

  SmokeCheck scaling{"ingest scaling 8 vs 1 workers >= 1.5x", SmokeStatus::skipped, ""};
  const RatePoint* one = at(1);
  const RatePoint* eight = at(8);
  if (!one || !eight) {
    scaling.detail = "sweep lacks 1- or 8-worker cells";
  } else if (hardware_threads < 4) {
    scaling.detail = "host has " + std::to_string(hardware_threads) +
                     " hardware threads (< 4); ratio " + num(eight->ingest_rate / one->ingest_rate);
  } else {
    const double ratio = eight->ingest_rate / one->ingest_rate;
    scaling.status = ratio >= 1.5 ? SmokeStatus::pass : SmokeStatus::warn;
    scaling.detail = "ratio " + num(ratio);
  }
  checks.push_back(scaling);

  SmokeCheck bottleneck{"load rate >= ingest rate at every worker count", SmokeStatus::pass, ""};
  for (const auto& m : means) {
    if (!(m.load_rate >= m.ingest_rate)) {
      bottleneck.status = SmokeStatus::warn;
      bottleneck.detail += (bottleneck.detail.empty() ? "" : "; ") + std::to_string(m.workers) +
                           " workers: load " + short_rate(m.load_rate) + " < ingest " +
                           short_rate(m.ingest_rate);
    }
  }
  if (bottleneck.status == SmokeStatus::pass) bottleneck.detail = "holds at " + std::to_string(means.size()) + " worker counts";
  checks.push_back(bottleneck);
  return checks;
}

}  // namespace brainschema
