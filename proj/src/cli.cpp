#include "brainschema/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "brainschema/bench.hpp"
#include "brainschema/codec.hpp"
#include "brainschema/config_file.hpp"
#include "brainschema/errors.hpp"
#include "brainschema/generator.hpp"
#include "brainschema/triple_io.hpp"

namespace brainschema {
namespace {

/// Bad flag values and config contents map to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SharedFlags {
  std::string config_path;
  std::string schema;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::optional<count_t> neurons;
  std::optional<count_t> columns;
};

KeyValueConfig load_settings(const SharedFlags& f) {
  KeyValueConfig kv = f.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(f.config_path);
  if (!f.schema.empty()) kv.set("schema", f.schema);
  if (f.neurons) kv.set("total_neurons", std::to_string(*f.neurons));
  if (f.columns) kv.set("total_columns", std::to_string(*f.columns));
  if (f.seed) kv.set("seed", std::to_string(*f.seed));
  return kv;
}

SchemaConfig schema_config(const KeyValueConfig& kv) {
  if (schema_kind(kv) == "cortex") return apply(kv, CortexConfig{});
  return apply(kv, CerebellumConfig{});
}

/// Writes to --out when given, otherwise to the command's standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string grouped(count_t v) {
  std::string digits = std::to_string(v);
  for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(i, ",");
  return digits;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f || !(f << text) || !f.flush()) throw Error("cannot write " + path);
}

// --- table1 ---------------------------------------------------------------

const std::vector<std::string> kTableHeader{
    "regions",           "columns",           "columns_per_region",
    "microcolumns_per_column", "microcolumns", "layers",
    "microcolumns_per_region", "regions_columns", "neurons_per_region_columns",
    "regions_microcolumns", "neurons_per_region_microcolumns", "total_neurons"};

std::vector<count_t> table_cells(const CortexDerived& d) {
  return {d.anatomical_regions,
          d.total_columns,
          d.columns_per_region.value,
          d.microcolumns_per_column.value,
          d.total_microcolumns.value,
          d.layers,
          d.microcolumns_per_region.value,
          d.regions_at_column_granularity,
          d.neurons_per_column_region.value,
          d.regions_at_microcolumn_granularity,
          d.neurons_per_final_region.value,
          d.total_neurons};
}

// CSV notes use ungrouped digits and no commas so the field needs no quoting.
std::string row_note(const CortexDerived& d, bool csv) {
  std::string note;
  if (d.erratum) {
    const auto num = [&](count_t v) { return csv ? std::to_string(v) : grouped(v); };
    note = "erratum: " + d.erratum->field + " printed " + num(d.erratum->printed) + (csv ? " " : ", ") +
           "derived " + num(d.erratum->derived);
  }
  const auto add = [&](const char* name, const Quotient& q) {
    if (q.exact()) return;
    if (!note.empty()) note += "; ";
    note += std::string("inexact ") + name + " (remainder " + std::to_string(q.remainder) + ")";
  };
  add("total_microcolumns", d.total_microcolumns);
  add("microcolumns_per_column", d.microcolumns_per_column);
  add("neurons_per_region_columns", d.neurons_per_column_region);
  add("neurons_per_region_microcolumns", d.neurons_per_final_region);
  return note;
}

void print_table(std::ostream& os, const std::vector<CortexDerived>& rows, bool csv) {
  if (csv) {
    for (const auto& h : kTableHeader) os << h << ',';
    os << "note\n";
    for (const auto& d : rows) {
      for (count_t v : table_cells(d)) os << v << ',';
      os << row_note(d, true) << '\n';
    }
    return;
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& d : rows) {
    std::vector<std::string> line;
    for (count_t v : table_cells(d)) line.push_back(grouped(v));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(kTableHeader.size());
  for (std::size_t c = 0; c < width.size(); ++c) {
    width[c] = kTableHeader[c].size();
    for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
  }
  for (std::size_t c = 0; c < width.size(); ++c) {
    os << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << kTableHeader[c];
  }
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      os << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << cells[r][c];
    }
    const std::string note = row_note(rows[r], false);
    if (!note.empty()) os << "  [" << note << ']';
    os << '\n';
  }
}

// --- bench ----------------------------------------------------------------

void print_plan(std::ostream& os, const BenchPlan& plan) {
  const auto join = [](const std::vector<count_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  os << "entries: " << join(plan.entry_counts) << '\n'
     << "workers: " << join(plan.worker_counts) << '\n'
     << "trials: " << plan.trials << '\n'
     << "backend: " << backend_name(plan.backend) << '\n'
     << "seed: " << plan.seed << '\n'
     << "batch_size: " << plan.batch_size << '\n'
     << "cells: " << plan.cells() << '\n';
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical brain-region naming, connectome generation and ingest benchmarks",
               "brainschema"};
  app.require_subcommand(1);
  app.fallthrough();

  SharedFlags shared;
  app.add_option("--config", shared.config_path, "Flat key = value config file");
  app.add_option("--schema", shared.schema, "cortex or cerebellum")
      ->check(CLI::IsMember({"cortex", "cerebellum"}));
  app.add_option("--seed", shared.seed, "Random seed");
  app.add_option("--out", shared.out_path, "Write data here instead of standard output");
  app.add_option("--neurons", shared.neurons, "Override total_neurons");
  app.add_option("--columns", shared.columns, "Override total_columns (cortex)");

  auto* table1 = app.add_subcommand("table1", "Print the derived cortex ranges table");
  std::string table_format = "text";
  table1->add_option("--format", table_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  auto* regions = app.add_subcommand("regions", "Enumerate region labels at a depth");
  int depth = 5;
  count_t limit = 0;
  bool count_only = false;
  regions->add_option("--depth", depth, "1 (hemisphere) to 5 (final region)")->check(CLI::Range(1, 5));
  regions->add_option("--limit", limit, "Stop after this many labels (0 = all)");
  regions->add_flag("--count", count_only, "Print only the number of regions");

  auto* label = app.add_subcommand("label", "Name the neuron at a linear index");
  count_t neuron_index = 0;
  label->add_option("index", neuron_index, "Linear neuron index")->required();

  auto* resolve = app.add_subcommand("resolve", "Print the index range of a region or neuron label");
  std::string label_text;
  resolve->add_option("label", label_text, "Region label, or label#slot for one neuron")->required();

  auto* gen = app.add_subcommand("gen", "Generate one sparse weight block as labeled triples");
  BlockSpec spec{0, 0, 1000, 1e-3, 1};
  gen->add_option("--block-row", spec.block_row, "Block row coordinate");
  gen->add_option("--block-col", spec.block_col, "Block column coordinate");
  gen->add_option("--dim", spec.dim, "Block edge length");
  gen->add_option("--sparsity", spec.sparsity, "Fraction of nonzero cells, in (0, 1]");

  auto* bench = app.add_subcommand("bench", "Sweep ingest runs over entry and worker counts");
  std::string entries_list, workers_list, backend, csv_path, plot_path, work_dir;
  std::optional<count_t> trials, batch_size;
  bool paper_preset = false, dry_run = false, per_entry_plot = false;
  bench->add_option("--entries", entries_list, "Comma-separated entry counts");
  bench->add_option("--workers", workers_list, "Comma-separated worker counts");
  bench->add_option("--trials", trials, "Trials per cell");
  bench->add_option("--backend", backend, "mem or disk")->check(CLI::IsMember({"mem", "disk", "memory", "durable"}));
  bench->add_option("--batch-size", batch_size, "Records per store batch");
  bench->add_option("--work-dir", work_dir, "Scratch directory for the disk backend");
  bench->add_option("--csv", csv_path, "Write result rows as CSV");
  bench->add_option("--plot", plot_path, "Write an SVG rate plot");
  bench->add_flag("--per-entry-plot", per_entry_plot, "Plot each entry count separately");
  bench->add_flag("--paper-preset", paper_preset, "50M/100M/500M entries x 1..18 workers");
  bench->add_flag("--dry-run", dry_run, "Print the resolved plan and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    KeyValueConfig kv;
    SchemaConfig config;
    try {
      kv = load_settings(shared);
      config = schema_config(kv);
      require_valid(validate_config(config));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    } catch (const FormatError& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
    for (const auto& v : validate_config(config)) err << "warning: " << v.field << ": " << v.message << '\n';

    if (table1->parsed()) {
      std::vector<CortexDerived> rows;
      const bool custom = !shared.config_path.empty() || shared.neurons || shared.columns;
      if (custom) {
        const auto* cortex = std::get_if<CortexConfig>(&config);
        if (!cortex) throw UsageError("table1 applies to the cortex schema");
        rows.push_back(derive_cortex_row(*cortex));
      } else {
        for (std::size_t r = 0; r < published_cortex_rows().size(); ++r) {
          rows.push_back(derive_cortex_row(published_cortex_config(r)));
        }
      }
      Sink sink(shared.out_path, out);
      print_table(*sink, rows, table_format == "csv");
      return 0;
    }

    const Schema schema(config);

    if (regions->parsed()) {
      Sink sink(shared.out_path, out);
      auto stream = enumerate_regions(schema, depth);
      if (count_only) {
        *sink << stream.size() << '\n';
        return 0;
      }
      count_t emitted = 0;
      while (auto l = stream.next()) {
        if (limit && emitted++ >= limit) break;
        *sink << format_label(*l, schema) << '\n';
      }
      return 0;
    }

    if (label->parsed()) {
      Sink sink(shared.out_path, out);
      *sink << qualified_name(neuron_index, schema) << '\n';
      return 0;
    }

    if (resolve->parsed()) {
      IndexRange range;
      if (label_text.find('#') != std::string::npos) {
        const count_t i = parse_qualified_name(label_text, schema);
        range = {i, i + 1};
      } else {
        range = region_neuron_range(parse_label(label_text, schema), schema);
      }
      Sink sink(shared.out_path, out);
      *sink << '[' << range.begin << ',' << range.end << ")\n";
      return 0;
    }

    if (gen->parsed()) {
      if (shared.seed) spec.seed = *shared.seed;
      try {
        validate_block(spec, schema);
      } catch (const SpecError& e) {
        throw UsageError(e.what());
      }
      const auto entries = generate_block(spec);
      const auto triples = label_triples(entries, spec, schema);
      Sink sink(shared.out_path, out);
      *sink << "# block " << spec.block_row << ' ' << spec.block_col << " dim " << spec.dim
            << " sparsity " << format_double(spec.sparsity) << " seed " << spec.seed << " nnz "
            << triples.size() << '\n';
      write_triples(*sink, triples);
      return 0;
    }

    if (bench->parsed()) {
      BenchPlan plan;
      try {
        if (paper_preset) plan = BenchPlan::paper_preset();
        plan = apply(kv, plan);
        if (!entries_list.empty()) plan.entry_counts = parse_count_list("entries", entries_list);
        if (!workers_list.empty()) plan.worker_counts = parse_count_list("workers", workers_list);
        if (trials) plan.trials = *trials;
        if (batch_size) plan.batch_size = *batch_size;
        if (!backend.empty()) {
          plan.backend = (backend == "mem" || backend == "memory") ? Backend::memory : Backend::durable;
        }
        if (!work_dir.empty()) plan.work_dir = work_dir;
        validate_plan(plan);
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      if (dry_run) {
        print_plan(out, plan);
        return 0;
      }

      std::vector<BenchResultRow> rows;
      int status = 0;
      try {
        rows = run_sweep(plan, [&](const BenchResultRow& r, const IngestMetrics& m) {
          err << "entries=" << r.entries << " workers=" << r.workers << " trial=" << r.trial
              << " for=" << format_double(r.for_rate) << "/s load=" << format_double(r.load_rate)
              << "/s ingest=" << format_double(r.ingest_rate) << "/s wall=" << m.wall_seconds << "s\n";
        });
      } catch (const SweepError& e) {
        err << "error: " << e.what() << '\n';
        rows = e.rows();
        status = 2;
      }

      const std::string csv = emit_csv(rows);
      if (csv_path.empty()) {
        Sink sink(shared.out_path, out);
        *sink << csv;
      } else {
        write_file(csv_path, csv);
      }
      if (!plot_path.empty() && !rows.empty()) {
        write_file(plot_path, emit_plot(rows, {per_entry_plot}));
      }
      for (const auto& check : smoke_checks(rows, std::thread::hardware_concurrency())) {
        if (check.status == SmokeStatus::warn) {
          err << "warning: " << check.name << ": " << check.detail << '\n';
        } else if (check.status == SmokeStatus::skipped) {
          err << "note: " << check.name << " skipped: " << check.detail << '\n';
        }
      }
      err << "phase aggregation: " << kPhaseAggregation << '\n';
      return status;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace brainschema
