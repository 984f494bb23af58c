//===-- mse_capi.cpp - C interface implementation -------------------------===//

#include "mse/mse.h"

#include "mse/Harness.h"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

struct mse_module {
  mse::Module module;
};

namespace {

thread_local std::string lastError;

mse_status fail(mse_status s, const std::string &msg) {
  lastError = msg;
  return s;
}

char *copyString(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void setString(char **out, const std::string &s) {
  if (out)
    *out = copyString(s);
}

/// Runs `body`, mapping exceptions to status codes.
template <typename F> mse_status guarded(F &&body) {
  try {
    lastError.clear();
    return body();
  } catch (const mse::ParseError &e) {
    return fail(MSE_ERR_PARSE, e.what());
  } catch (const mse::EnumCapExceeded &e) {
    return fail(MSE_ERR_SOLVER, e.what());
  } catch (const std::invalid_argument &e) {
    return fail(MSE_ERR_ARGUMENT, e.what());
  } catch (const std::exception &e) {
    return fail(MSE_ERR_INTERNAL, e.what());
  }
}

mse_status requireValid(const mse::Module &m) {
  auto diags = mse::validateModule(m);
  if (diags.empty())
    return MSE_OK;
  std::string msg;
  for (const mse::Diagnostic &d : diags)
    msg += d.str() + "\n";
  return fail(MSE_ERR_INVALID, msg);
}

mse::DseConfig toConfig(const mse_run_options *opts) {
  mse_run_options defaults;
  mse_run_options_init(&defaults);
  if (!opts)
    opts = &defaults;
  mse::DseConfig cfg;
  cfg.strategy = opts->strategy == MSE_BFS ? mse::Strategy::Bfs : mse::Strategy::Dfs;
  cfg.mergeStates = opts->merge_states != 0;
  cfg.caching = opts->caching != 0;
  cfg.backend = opts->backend == MSE_BACKEND_ENUM ? mse::Backend::Enum : mse::Backend::Sat;
  cfg.enumCapBits = opts->enum_cap_bits;
  cfg.maxTimeSeconds = opts->max_time_seconds;
  cfg.maxPaths = opts->max_paths;
  if (opts->dump_smt_dir)
    cfg.dumpSmtDir = opts->dump_smt_dir;
  return cfg;
}

mse_module *wrap(mse::Module m) { return new mse_module{std::move(m)}; }

} // namespace

extern "C" {

const char *mse_version(void) { return "1.0.0"; }

const char *mse_last_error(void) { return lastError.c_str(); }

void mse_string_free(char *s) { std::free(s); }

mse_status mse_module_parse(const char *text, mse_module **out) {
  if (!text || !out)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(mse::parseModule(text));
    return MSE_OK;
  });
}

mse_status mse_module_load(const char *path, mse_module **out) {
  if (!path || !out)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  std::ifstream in(path);
  if (!in)
    return fail(MSE_ERR_IO, std::string("cannot open ") + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return guarded([&] {
    try {
      *out = wrap(mse::parseModule(ss.str()));
    } catch (const mse::ParseError &e) {
      return fail(MSE_ERR_PARSE, std::string(path) + ":" + e.what());
    }
    return MSE_OK;
  });
}

mse_status mse_module_benchmark(const char *name, unsigned size, unsigned bits,
                                mse_module **out) {
  if (!name || !out)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(mse::benchmarkModule(name, size, bits));
    return MSE_OK;
  });
}

void mse_module_free(mse_module *m) { delete m; }

mse_status mse_module_print(const mse_module *m, char **text) {
  if (!m || !text)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    setString(text, mse::printModule(m->module));
    return MSE_OK;
  });
}

mse_status mse_module_validate(const mse_module *m, char **diagnostics_json) {
  if (!m)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    nlohmann::json out = nlohmann::json::array();
    auto diags = mse::validateModule(m->module);
    for (const mse::Diagnostic &d : diags)
      out.push_back({{"rule", d.rule},
                     {"function", d.function},
                     {"block", d.block},
                     {"index", d.index},
                     {"message", d.message}});
    setString(diagnostics_json, out.dump(2));
    return diags.empty() ? MSE_OK : fail(MSE_ERR_INVALID, "module has diagnostics");
  });
}

mse_status mse_analyze(const mse_module *m, char **facts_json) {
  if (!m || !facts_json)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (mse_status s = requireValid(m->module))
      return s;
    setString(facts_json, mse::factsJson(mse::analyzeProgram(m->module)));
    return MSE_OK;
  });
}

mse_status mse_transform(const mse_module *m, const char *const *skip_locations,
                         size_t num_skip, mse_module **out, char **report_json) {
  if (!m || !out)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (mse_status s = requireValid(m->module))
      return s;
    mse::LocationConstraints lc;
    for (size_t i = 0; i < num_skip; ++i)
      lc.insert(skip_locations[i]);
    mse::TransformResult t =
        mse::runCfmse(m->module, mse::analyzeProgram(m->module), lc);
    setString(report_json, mse::transformReportJson(t.report));
    *out = wrap(std::move(t.module));
    return MSE_OK;
  });
}

void mse_run_options_init(mse_run_options *opts) {
  if (!opts)
    return;
  opts->strategy = MSE_DFS;
  opts->merge_states = 0;
  opts->caching = 1;
  opts->backend = MSE_BACKEND_SAT;
  opts->enum_cap_bits = 20;
  opts->max_time_seconds = 0;
  opts->max_paths = 0;
  opts->dump_smt_dir = nullptr;
}

mse_status mse_run(const mse_module *m, const mse_run_options *opts,
                   char **report_json, mse_termination *termination) {
  if (!m)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (mse_status s = requireValid(m->module))
      return s;
    mse::DseReport r = mse::runDse(m->module, toConfig(opts));
    setString(report_json, mse::dseReportJson(r));
    if (termination)
      *termination = static_cast<mse_termination>(r.termination);
    return MSE_OK;
  });
}

mse_status mse_driver(const mse_module *m, const mse_run_options *opts,
                      unsigned max_iterations, char **state_json,
                      int *budget_exhausted) {
  if (!m)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (mse_status s = requireValid(m->module))
      return s;
    mse::DriverConfig cfg;
    cfg.dse = toConfig(opts);
    cfg.dse.mergeStates = false;
    if (max_iterations)
      cfg.maxIterations = max_iterations;
    mse::DriverState st = mse::driverLoop(m->module, cfg);
    setString(state_json, mse::driverStateJson(st));
    if (budget_exhausted)
      *budget_exhausted = st.budgetExhausted ? 1 : 0;
    return MSE_OK;
  });
}

mse_status mse_compare(const char *const *benchmarks, size_t num_benchmarks,
                       const unsigned *sizes, size_t num_sizes,
                       const char *const *modes, size_t num_modes, unsigned bits,
                       const mse_run_options *opts, unsigned jobs,
                       char **matrix_json, char **table, int *any_out_of_time) {
  return guarded([&] {
    mse::CompareConfig cfg;
    for (size_t i = 0; i < num_benchmarks; ++i) {
      if (!mse::findBenchmark(benchmarks[i]))
        return fail(MSE_ERR_ARGUMENT, std::string("unknown benchmark ") + benchmarks[i]);
      cfg.benchmarks.push_back(benchmarks[i]);
    }
    cfg.sizes.assign(sizes, sizes + num_sizes);
    if (num_modes) {
      cfg.modes.clear();
      for (size_t i = 0; i < num_modes; ++i) {
        auto mode = mse::modeFromName(modes[i]);
        if (!mode)
          return fail(MSE_ERR_ARGUMENT, std::string("unknown mode ") + modes[i]);
        cfg.modes.push_back(*mode);
      }
    }
    cfg.bits = bits ? bits : 8;
    cfg.dse = toConfig(opts);
    cfg.jobs = jobs;
    mse::CompareMatrix matrix = mse::runCompare(cfg);
    setString(matrix_json, mse::compareJson(matrix));
    setString(table, mse::compareTable(matrix));
    if (any_out_of_time) {
      *any_out_of_time = 0;
      for (const mse::CompareCell &c : matrix.cells)
        if (c.outOfTime)
          *any_out_of_time = 1;
    }
    return MSE_OK;
  });
}

mse_status mse_concrete_run(const mse_module *m, const char *input_json,
                            char **result_json) {
  if (!m || !input_json)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (mse_status s = requireValid(m->module))
      return s;
    nlohmann::json in;
    try {
      in = nlohmann::json::parse(input_json);
    } catch (const nlohmann::json::exception &e) {
      return fail(MSE_ERR_ARGUMENT, std::string("bad input JSON: ") + e.what());
    }
    mse::ConcreteInput input = in.get<mse::ConcreteInput>();
    mse::ConcreteResult r = mse::concreteRun(m->module, input);
    nlohmann::json out = {{"crashed", r.crashed}, {"step_limit", r.stepLimit},
                          {"memory", r.memory}};
    if (r.crashed) {
      out["kind"] = std::string(mse::crashKindName(r.crashKind));
      out["loc"] = r.crashSite.str();
    }
    if (r.returnValue)
      out["return"] = *r.returnValue;
    setString(result_json, out.dump(2));
    return MSE_OK;
  });
}

mse_status mse_benchmark_list(char **list_json) {
  if (!list_json)
    return fail(MSE_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    nlohmann::json out = nlohmann::json::array();
    for (const mse::BenchmarkInfo &b : mse::benchmarks())
      out.push_back({{"name", b.name},
                     {"description", b.description},
                     {"default_size", b.defaultSize},
                     {"small_size", b.smallSize},
                     {"small_bits", b.smallBits}});
    setString(list_json, out.dump(2));
    return MSE_OK;
  });
}

} // extern "C"
