// Command-line front end: graph generation, filter design, application,
// distributed simulation, and the bundled experiment drivers.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gfev/design.hpp"
#include "gfev/distsim.hpp"
#include "gfev/experiments.hpp"
#include "gfev/filters.hpp"
#include "gfev/graph.hpp"
#include "gfev/io.hpp"
#include "gfev/nullspace.hpp"
#include "gfev/serialize.hpp"
#include "gfev/spectral.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDesign = 3;
constexpr int kExitLocality = 4;

int exit_code_for(const gfev::Error& e, bool designing) {
  switch (e.code()) {
    case gfev::ErrorCode::locality_violation:
    case gfev::ErrorCode::dimension_mismatch:
      return kExitLocality;
    case gfev::ErrorCode::divergent_filter:
      return kExitDesign;
    case gfev::ErrorCode::invalid_argument:
    case gfev::ErrorCode::unsupported_kind:
      return designing ? kExitDesign : kExitUsage;
    default:
      return 1;
  }
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> orders;
  auto range = text.find("..");
  if (range != std::string::npos) {
    int lo = std::stoi(text.substr(0, range));
    int hi = std::stoi(text.substr(range + 2));
    for (int k = lo; k <= hi; ++k) orders.push_back(k);
    return orders;
  }
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    orders.push_back(std::stoi(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return orders;
}

gfev::ShiftKind parse_shift(const std::string& name) {
  if (name == "adjacency") return gfev::ShiftKind::adjacency;
  if (name == "laplacian") return gfev::ShiftKind::laplacian;
  if (name == "normalized-laplacian")
    return gfev::ShiftKind::normalized_laplacian;
  gfev::fail(gfev::ErrorCode::invalid_argument, "unknown shift: " + name);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) gfev::fail(gfev::ErrorCode::io_error, "cannot open " + path);
  out << body;
}

// ---------------------------------------------------------------------------

struct GraphArgs {
  std::string kind;
  int n = 16;
  int k = 0;
  int clusters = 4;
  double p_in = 0.8, p_out = 0.05, side = 4.0;
  std::uint64_t seed = 0;
  std::string out = "graph.tsv";
};

int run_graph(const GraphArgs& a) {
  gfev::Graph g;
  if (a.kind == "ring")
    g = gfev::ring_graph(a.n);
  else if (a.kind == "path")
    g = gfev::path_graph(a.n);
  else if (a.kind == "star")
    g = gfev::star_graph(a.n);
  else if (a.kind == "complete")
    g = gfev::complete_graph(a.n);
  else if (a.kind == "community")
    g = gfev::random_community_graph(a.n, a.clusters, a.p_in, a.p_out, a.seed);
  else if (a.kind == "knn")
    g = gfev::random_geometric_knn_graph(a.n, a.k, a.side, a.seed);
  else
    gfev::fail(gfev::ErrorCode::invalid_argument,
               "unknown generator: " + a.kind);
  gfev::write_edge_list(g, a.out);
  std::cout << "n " << g.n << " edges " << g.edge_count() << " connected "
            << (g.connected() ? 1 : 0) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct DesignArgs {
  std::string graph_file;
  std::string shift = "laplacian";
  std::string family = "cev";
  std::string target_file;     // Matrix Market target operator
  std::string target_kernel;   // or a named modal target
  int order = 3;
  double delta = 0.7;
  double gamma = 3.0, mu = 0.75, lambda_c = 1.0;
  std::uint64_t seed = 0;
  std::string out = "design";
};

int run_design(const DesignArgs& a) {
  gfev::Graph g = gfev::read_edge_list(a.graph_file);
  gfev::ShiftOperator<double> shift =
      gfev::build_shift(g, parse_shift(a.shift));
  auto dec = gfev::eigendecompose(shift);

  gfev::MatX<double> target;
  gfev::VecX<double> htarget;
  if (!a.target_file.empty()) {
    target = gfev::read_matrix_market(a.target_file);
    if (target.rows() != g.n || target.cols() != g.n)
      gfev::fail(gfev::ErrorCode::dimension_mismatch,
                 "target shape != graph size");
    htarget = (dec.inv_eigvecs * target * dec.eigvecs).diagonal();
  } else {
    if (a.target_kernel == "exp")
      htarget = gfev::target_exponential_kernel(dec.eigvals, a.gamma, a.mu);
    else if (a.target_kernel == "lowpass")
      htarget = gfev::target_ideal_lowpass(dec.eigvals, a.lambda_c);
    else if (a.target_kernel == "identity")
      htarget = gfev::VecX<double>::Ones(g.n);
    else
      gfev::fail(gfev::ErrorCode::invalid_argument,
                 "unknown target kernel: " + a.target_kernel);
    target = dec.eigvecs * htarget.asDiagonal() * dec.inv_eigvecs;
  }

  gfev::FilterSpec<double> filter;
  gfev::DesignReport report;
  if (a.family == "classical") {
    auto cls = gfev::design_classical_ls(dec.eigvals, htarget, a.order);
    report.nse = gfev::nse(target, gfev::dense_matrix(cls, shift));
    report.iterations = 1;
    filter = cls;
  } else if (a.family == "nv") {
    auto [f, r] = gfev::design_nv_ls(shift, target, a.order);
    filter = std::move(f);
    report = r;
  } else if (a.family == "cev") {
    auto [f, r] = gfev::design_cev_ls(shift, target, a.order);
    filter = std::move(f);
    report = r;
  } else if (a.family == "ev") {
    gfev::BcdOptions opts;
    opts.seed = a.seed;
    auto [f, r] = gfev::design_ev_bcd(shift, target, a.order, opts);
    filter = std::move(f);
    report = r;
  } else if (a.family == "siev") {
    auto basis = gfev::nullspace_basis(dec, gfev::support_pattern(shift));
    gfev::BcdOptions opts;
    opts.seed = a.seed;
    auto [f, r] =
        gfev::design_siev_bcd(basis, dec.eigvals, htarget, a.order, opts);
    report = r;
    report.nse = gfev::nse(target, gfev::dense_matrix(f, shift));
    filter = std::move(f);
  } else if (a.family == "sicev") {
    auto basis = gfev::nullspace_basis(dec, gfev::support_pattern(shift));
    auto [f, r] = gfev::design_sicev_ls(basis, dec.eigvals, htarget, a.order);
    report = r;
    report.nse = gfev::nse(target, gfev::dense_matrix(f, shift));
    filter = std::move(f);
  } else if (a.family == "evarma1") {
    auto [f, r] = gfev::design_ev_arma1(shift, target, a.delta);
    filter = std::move(f);
    report = r;
  } else if (a.family == "sieva1") {
    auto basis = gfev::nullspace_basis(dec, gfev::support_pattern(shift));
    auto [f, r] = gfev::design_sieva1(basis, dec.eigvals, htarget, a.delta);
    report = r;
    report.nse = gfev::nse(target, gfev::dense_matrix(f, shift));
    filter = std::move(f);
  } else {
    gfev::fail(gfev::ErrorCode::invalid_argument,
               "unknown family: " + a.family);
  }

  gfev::json fj = gfev::filter_json(filter);
  write_text(a.out + ".filter.json", fj.dump(2) + "\n");
  gfev::json rj = report;
  write_text(a.out + ".report.json", rj.dump(2) + "\n");
  std::cout << "nse " << gfev::format_number(report.nse) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ApplyArgs {
  std::string filter_file;
  std::string graph_file;
  std::string signal_file;
  std::string shift = "laplacian";
  std::string out = "output.csv";
  std::string trace_out;
  bool distributed = false;
};

template <class S>
int run_apply_typed(const ApplyArgs& a, const gfev::json& fj) {
  gfev::FilterSpec<S> filter = gfev::filter_from_json<S>(fj);
  gfev::Graph g = gfev::read_edge_list(a.graph_file);
  gfev::ShiftOperator<S> shift = [&] {
    auto s = gfev::build_shift(g, parse_shift(a.shift));
    if constexpr (gfev::is_complex_v<S>)
      return gfev::to_complex(s);
    else
      return s;
  }();
  gfev::VecX<S> x;
  if constexpr (gfev::is_complex_v<S>)
    x = gfev::read_signal_csv_complex(a.signal_file);
  else
    x = gfev::read_signal_csv(a.signal_file);

  gfev::VecX<S> y;
  if (a.distributed) {
    gfev::SimulationTrace<S> trace;
    gfev::SimOptions opts;
    y = gfev::simulate(filter, shift, x, opts, &trace);
    if (!a.trace_out.empty()) gfev::write_trace_jsonl(trace, a.trace_out);
    std::cout << "rounds " << trace.rounds << " scalars "
              << trace.total_scalars_sent << " violations "
              << trace.violations.size() << "\n";
  } else {
    y = gfev::apply_recursive(filter, shift, x);
  }
  gfev::write_signal_csv(y, a.out);
  return 0;
}

int run_apply(const ApplyArgs& a) {
  std::ifstream in(a.filter_file);
  if (!in)
    gfev::fail(gfev::ErrorCode::io_error, "cannot open " + a.filter_file);
  gfev::json fj = gfev::json::parse(in);
  if (fj.at("field").get<std::string>() == "complex")
    return run_apply_typed<gfev::Cplx>(a, fj);
  return run_apply_typed<double>(a, fj);
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  gfev::ExperimentConfig cfg;
  std::string orders_text;
  std::string families_text;
  std::string shift = "laplacian";
  std::string out = "result";
};

int run_experiment(ExperimentArgs a) {
  if (!a.orders_text.empty()) a.cfg.orders = parse_orders(a.orders_text);
  if (!a.families_text.empty()) {
    a.cfg.families.clear();
    size_t pos = 0;
    while (pos < a.families_text.size()) {
      size_t comma = a.families_text.find(',', pos);
      if (comma == std::string::npos) comma = a.families_text.size();
      a.cfg.families.push_back(a.families_text.substr(pos, comma - pos));
      pos = comma + 1;
    }
  }
  a.cfg.shift_kind = parse_shift(a.shift);
  a.cfg.out_prefix = a.out;

  gfev::ResultTable table;
  if (a.name == "response") {
    table = gfev::exp_response_approx(a.cfg);
  } else if (a.name == "consensus") {
    table = gfev::exp_consensus(a.cfg);
  } else if (a.name == "wiener") {
    table = gfev::exp_wiener(a.cfg);
  } else if (a.name == "beamforming") {
    gfev::BeamformingResult r = gfev::exp_beamforming(a.cfg);
    for (const auto& bp : r.patterns)
      gfev::write_beampattern_csv(
          bp, a.out + ".beampattern_theta" +
                  std::to_string(static_cast<int>(bp.theta0_deg)) + ".csv");
    table = std::move(r.table);
  } else if (a.name == "distls") {
    table = gfev::exp_distributed_ls(a.cfg);
  } else if (a.name == "tikhonov") {
    table = gfev::exp_tikhonov(a.cfg);
  } else {
    gfev::fail(gfev::ErrorCode::invalid_argument,
               "unknown experiment: " + a.name);
  }
  gfev::write_result_csv(table, a.out + ".csv");
  gfev::json j;
  j["seed"] = table.seed;
  j["n"] = table.n;
  j["edges"] = table.edges;
  gfev::json rows = gfev::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"family", r.family},
                    {"K_or_iter", r.k_or_iter},
                    {"metric", r.metric},
                    {"value", r.value}});
  j["rows"] = rows;
  write_text(a.out + ".json", j.dump(2) + "\n");
  std::cout << "rows " << table.rows.size() << " -> " << a.out << ".csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-variant graph filter toolkit"};
  app.require_subcommand(1);

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "generate a graph edge list");
  graph->add_option("kind", ga.kind, "ring|path|star|complete|community|knn")
      ->required();
  graph->add_option("--n", ga.n);
  graph->add_option("--k", ga.k, "neighbors (knn)")->check(CLI::PositiveNumber);
  graph->add_option("--clusters", ga.clusters);
  graph->add_option("--p-in", ga.p_in);
  graph->add_option("--p-out", ga.p_out);
  graph->add_option("--side", ga.side);
  graph->add_option("--seed", ga.seed);
  graph->add_option("--out", ga.out);

  DesignArgs da;
  auto* design = app.add_subcommand("design", "fit a filter to a target");
  design->add_option("--graph", da.graph_file)->required();
  design->add_option("--shift", da.shift);
  design->add_option("--family", da.family)->required();
  design->add_option("--target", da.target_file, "Matrix Market operator");
  design->add_option("--target-kernel", da.target_kernel,
                     "exp|lowpass|identity");
  design->add_option("--k", da.order);
  design->add_option("--delta", da.delta);
  design->add_option("--gamma", da.gamma);
  design->add_option("--mu", da.mu);
  design->add_option("--lambda-c", da.lambda_c);
  design->add_option("--seed", da.seed);
  design->add_option("--out", da.out);

  ApplyArgs aa;
  auto* apply = app.add_subcommand("apply", "apply a filter (dense path)");
  auto* simulate =
      app.add_subcommand("simulate", "apply a filter via message passing");
  for (auto* cmd : {apply, simulate}) {
    cmd->add_option("--filter", aa.filter_file)->required();
    cmd->add_option("--graph", aa.graph_file)->required();
    cmd->add_option("--signal", aa.signal_file)->required();
    cmd->add_option("--shift", aa.shift);
    cmd->add_option("--out", aa.out);
  }
  simulate->add_option("--trace", aa.trace_out);

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "run a bundled study");
  experiment
      ->add_option("name", ea.name,
                   "response|consensus|wiener|beamforming|distls|tikhonov")
      ->required();
  experiment->add_option("--graph", ea.cfg.graph,
                         "community|ring|star|complete|knn|file");
  experiment->add_option("--graph-file", ea.cfg.graph_file);
  experiment->add_option("--n", ea.cfg.n);
  experiment->add_option("--clusters", ea.cfg.clusters);
  experiment->add_option("--p-in", ea.cfg.p_in);
  experiment->add_option("--p-out", ea.cfg.p_out);
  experiment->add_option("--knn-k", ea.cfg.knn_k);
  experiment->add_option("--side", ea.cfg.side);
  experiment->add_option("--seed", ea.cfg.seed);
  experiment->add_option("--shift", ea.shift);
  experiment->add_option("--orders", ea.orders_text, "e.g. 1..6 or 2,4,8");
  experiment->add_option("--families", ea.families_text,
                         "comma list: classical,nv,cev,siev");
  experiment->add_option("--gamma", ea.cfg.gamma);
  experiment->add_option("--mu", ea.cfg.mu);
  experiment->add_option("--lambda-c", ea.cfg.lambda_c);
  experiment->add_option("--delta", ea.cfg.deltas);
  experiment->add_option("--mu-tik", ea.cfg.mu_tik);
  experiment->add_option("--noise-var", ea.cfg.noise_var);
  experiment->add_option("--cev-order", ea.cfg.cev_order);
  experiment->add_option("--iterations", ea.cfg.iterations);
  experiment->add_option("--samples", ea.cfg.samples_csv);
  experiment->add_option("--out", ea.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  const bool designing = design->parsed();
  try {
    if (graph->parsed()) return run_graph(ga);
    if (design->parsed()) return run_design(da);
    if (apply->parsed()) {
      aa.distributed = false;
      return run_apply(aa);
    }
    if (simulate->parsed()) {
      aa.distributed = true;
      return run_apply(aa);
    }
    if (experiment->parsed()) return run_experiment(ea);
  } catch (const gfev::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e, designing);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
