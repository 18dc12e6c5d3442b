#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "brainschema/bench.hpp"
#include "brainschema/codec.hpp"
#include "brainschema/generator.hpp"
#include "brainschema/ingest.hpp"
#include "brainschema/store.hpp"

namespace py = pybind11;
using namespace brainschema;

namespace {

py::dict quotient(const Quotient& q) {
  py::dict d;
  d["value"] = q.value;
  d["remainder"] = q.remainder;
  return d;
}

py::dict derived_row(const CortexDerived& r) {
  py::dict d;
  d["anatomical_regions"] = r.anatomical_regions;
  d["total_columns"] = r.total_columns;
  d["columns_per_region"] = quotient(r.columns_per_region);
  d["microcolumns_per_column"] = quotient(r.microcolumns_per_column);
  d["total_microcolumns"] = quotient(r.total_microcolumns);
  d["layers"] = r.layers;
  d["microcolumns_per_region"] = quotient(r.microcolumns_per_region);
  d["regions_at_column_granularity"] = r.regions_at_column_granularity;
  d["neurons_per_column_region"] = quotient(r.neurons_per_column_region);
  d["regions_at_microcolumn_granularity"] = r.regions_at_microcolumn_granularity;
  d["neurons_per_final_region"] = quotient(r.neurons_per_final_region);
  d["total_neurons"] = r.total_neurons;
  d["exact"] = r.exact();
  if (r.erratum) {
    py::dict e;
    e["field"] = r.erratum->field;
    e["printed"] = r.erratum->printed;
    e["derived"] = r.erratum->derived;
    d["erratum"] = e;
  } else {
    d["erratum"] = py::none();
  }
  return d;
}

py::dict metrics_dict(const IngestMetrics& m) {
  py::dict d;
  d["entries"] = m.entries;
  d["workers"] = m.workers;
  d["batch_size"] = m.batch_size;
  d["for_seconds"] = m.for_seconds;
  d["load_seconds"] = m.load_seconds;
  d["ingest_seconds"] = m.ingest_seconds;
  d["for_rate"] = m.for_rate;
  d["load_rate"] = m.load_rate;
  d["ingest_rate"] = m.ingest_rate;
  d["wall_seconds"] = m.wall_seconds;
  return d;
}

py::dict row_dict(const BenchResultRow& r) {
  py::dict d;
  d["entries"] = r.entries;
  d["workers"] = r.workers;
  d["trial"] = r.trial;
  d["for_rate"] = r.for_rate;
  d["load_rate"] = r.load_rate;
  d["ingest_rate"] = r.ingest_rate;
  d["total_seconds"] = r.total_seconds;
  return d;
}

BenchResultRow row_from(const py::dict& d) {
  return {d["entries"].cast<count_t>(),       d["workers"].cast<count_t>(),
          d["trial"].cast<count_t>(),         d["for_rate"].cast<double>(),
          d["load_rate"].cast<double>(),      d["ingest_rate"].cast<double>(),
          d["total_seconds"].cast<double>()};
}

std::vector<BenchResultRow> rows_from(const py::list& rows) {
  std::vector<BenchResultRow> out;
  for (const auto& r : rows) out.push_back(row_from(r.cast<py::dict>()));
  return out;
}

py::tuple address_tuple(const NeuronAddress& a) {
  return py::make_tuple(a.hemisphere, a.region, a.column, a.microcolumn, a.layer, a.slot);
}

Backend backend_from(const std::string& name) {
  if (name == "memory" || name == "mem") return Backend::memory;
  if (name == "durable" || name == "disk") return Backend::durable;
  throw ConfigError("backend", "unknown backend '" + name + "' (memory or durable)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hierarchical brain-region naming, synthetic connectome blocks and ingest benchmarks";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<AddressError>(m, "AddressError", error);
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<FormatError>(m, "FormatError", error);
  py::register_exception<SpecError>(m, "SpecError", error);
  py::register_exception<StoreError>(m, "StoreError", error);

  py::class_<CortexConfig>(m, "CortexConfig")
      .def(py::init<>())
      .def_readwrite("hemisphere_names", &CortexConfig::hemisphere_names)
      .def_readwrite("regions_per_hemisphere", &CortexConfig::regions_per_hemisphere)
      .def_readwrite("region_names", &CortexConfig::region_names)
      .def_readwrite("total_neurons", &CortexConfig::total_neurons)
      .def_readwrite("total_columns", &CortexConfig::total_columns)
      .def_readwrite("neurons_per_microcolumn", &CortexConfig::neurons_per_microcolumn)
      .def_readwrite("layer_names", &CortexConfig::layer_names);

  py::class_<CerebellumConfig>(m, "CerebellumConfig")
      .def(py::init<>())
      .def_readwrite("hemisphere_names", &CerebellumConfig::hemisphere_names)
      .def_readwrite("functional_regions", &CerebellumConfig::functional_regions)
      .def_readwrite("region_names", &CerebellumConfig::region_names)
      .def_readwrite("lobules", &CerebellumConfig::lobules)
      .def_readwrite("microzones", &CerebellumConfig::microzones)
      .def_readwrite("modules_per_microzone", &CerebellumConfig::modules_per_microzone)
      .def_readwrite("total_neurons", &CerebellumConfig::total_neurons)
      .def_readwrite("layer_names", &CerebellumConfig::layer_names);

  m.def("derive_cortex_row", [](const CortexConfig& c) { return derived_row(derive_cortex_row(c)); });
  m.def("published_cortex_rows", [] {
    py::list rows;
    for (std::size_t i = 0; i < published_cortex_rows().size(); ++i) {
      rows.append(derived_row(derive_cortex_row(published_cortex_config(i))));
    }
    return rows;
  });
  m.def("total_regions", py::overload_cast<const CortexConfig&>(&total_regions));
  m.def("total_regions", py::overload_cast<const CerebellumConfig&>(&total_regions));

  py::class_<Schema>(m, "Schema")
      .def(py::init<const CortexConfig&>(), py::arg("config") = CortexConfig{})
      .def(py::init<const CerebellumConfig&>())
      .def_property_readonly("kind",
                             [](const Schema& s) { return s.kind() == SchemaKind::cortex ? "cortex" : "cerebellum"; })
      .def_property_readonly("total_neurons", &Schema::total_neurons)
      .def("regions_at_depth", &Schema::regions_at_depth, py::arg("depth"))
      .def("level_name", [](const Schema& s, int depth) { return std::string(s.level_name(depth)); })
      .def("label", [](const Schema& s, count_t index) { return qualified_name(index, s); }, py::arg("index"),
           "Fully qualified name of a neuron: label#slot.")
      .def("index", [](const Schema& s, const std::string& name) { return parse_qualified_name(name, s); },
           py::arg("name"))
      .def("address", [](const Schema& s, count_t index) { return address_tuple(neuron_to_address(index, s)); },
           py::arg("index"), "(hemisphere, region, column, microcolumn, layer, slot), all 0-based.")
      .def(
          "resolve",
          [](const Schema& s, const std::string& label) {
            const IndexRange r = region_neuron_range(parse_label(label, s), s);
            return py::make_tuple(r.begin, r.end);
          },
          py::arg("label"), "Half-open neuron index range of a region label.")
      .def(
          "region",
          [](const Schema& s, int depth, count_t ordinal) { return format_label(region_at(depth, ordinal, s), s); },
          py::arg("depth"), py::arg("ordinal"))
      .def(
          "regions",
          [](const Schema& s, int depth, count_t limit) {
            std::vector<std::string> out;
            RegionEnumerator e = enumerate_regions(s, depth);
            while (limit == 0 || out.size() < limit) {
              auto label = e.next();
              if (!label) break;
              out.push_back(format_label(*label, s));
            }
            return out;
          },
          py::arg("depth") = kLabelDepth, py::arg("limit") = 0);

  m.def(
      "generate_block",
      [](count_t block_row, count_t block_col, count_t dim, double sparsity, std::uint64_t seed) {
        std::vector<LocalEntry> entries;
        {
          py::gil_scoped_release release;
          entries = generate_block({block_row, block_col, dim, sparsity, seed});
        }
        py::list out;
        for (const auto& e : entries) out.append(py::make_tuple(e.row, e.col, e.weight));
        return out;
      },
      py::arg("block_row"), py::arg("block_col"), py::arg("dim"), py::arg("sparsity"), py::arg("seed") = 0,
      "Block-local (row, col, weight) entries in row-major order.");
  m.def(
      "label_triples",
      [](const Schema& schema, count_t block_row, count_t block_col, count_t dim, double sparsity,
         std::uint64_t seed) {
        const BlockSpec spec{block_row, block_col, dim, sparsity, seed};
        std::vector<Triple> triples;
        {
          py::gil_scoped_release release;
          triples = label_triples(generate_block(spec), spec, schema);
        }
        py::list out;
        for (const auto& t : triples) out.append(py::make_tuple(t.row, t.col, t.weight));
        return out;
      },
      py::arg("schema"), py::arg("block_row"), py::arg("block_col"), py::arg("dim"), py::arg("sparsity"),
      py::arg("seed") = 0, "Generated block with qualified neuron names for rows and columns.");

  py::class_<Store>(m, "Store")
      .def("count", &Store::count, py::call_guard<py::gil_scoped_release>())
      .def(
          "scan",
          [](const Store& store, const std::string& lo, std::optional<std::string> hi, std::size_t limit) {
            std::vector<std::tuple<std::string, std::string, double>> out;
            {
              py::gil_scoped_release release;
              std::optional<std::string_view> upper;
              if (hi) upper = *hi;
              store.scan_range(lo, upper, [&](std::string_view key, std::string_view value) {
                const auto sep = key.find('\0');
                out.emplace_back(std::string(key.substr(0, sep)), std::string(key.substr(sep + 1)),
                                 decode_weight(value));
                return limit == 0 || out.size() < limit;
              });
            }
            return out;
          },
          py::arg("lo") = "", py::arg("hi") = py::none(), py::arg("limit") = 0,
          "(row, col, weight) for every key in [lo, hi), in key order.");

  m.def("memory_store", &memory_store);
  m.def(
      "durable_store", [](const std::filesystem::path& dir, bool sync) { return durable_store(dir, {sync}); },
      py::arg("directory"), py::arg("sync") = true);

  m.def(
      "ingest",
      [](Store& store, const Schema& schema, count_t entries, count_t workers, count_t batch_size,
         std::uint64_t seed, count_t block_dim, count_t max_block_entries) {
        IngestMetrics metrics;
        {
          py::gil_scoped_release release;
          const auto blocks = plan_blocks(entries, block_dim, max_block_entries, seed, schema);
          metrics = run_ingest(blocks, schema, workers, batch_size, store);
        }
        return metrics_dict(metrics);
      },
      py::arg("store"), py::arg("schema"), py::arg("entries"), py::arg("workers") = 1,
      py::arg("batch_size") = kDefaultBatchSize, py::arg("seed") = 1, py::arg("block_dim") = 10'000,
      py::arg("max_block_entries") = 250'000, "Generates, labels, loads and ingests `entries` triples.");

  m.def(
      "bench",
      [](std::vector<count_t> entries, std::vector<count_t> workers, count_t trials, const std::string& backend,
         std::uint64_t seed, count_t batch_size) {
        BenchPlan plan;
        plan.entry_counts = std::move(entries);
        plan.worker_counts = std::move(workers);
        plan.trials = trials;
        plan.backend = backend_from(backend);
        plan.seed = seed;
        plan.batch_size = batch_size;
        std::vector<BenchResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(plan);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("entries"), py::arg("workers"), py::arg("trials") = 1, py::arg("backend") = "memory",
      py::arg("seed") = 1, py::arg("batch_size") = kDefaultBatchSize);
  m.def("csv", [](const py::list& rows) { return emit_csv(rows_from(rows)); }, py::arg("rows"));
  m.def(
      "plot",
      [](const py::list& rows, bool per_entry_count) { return emit_plot(rows_from(rows), {per_entry_count}); },
      py::arg("rows"), py::arg("per_entry_count") = false);
}
