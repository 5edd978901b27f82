#include "degenkit/degenkit.h"

#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <string>

#include "error.hpp"
#include "expr.hpp"
#include "funcspace.hpp"
#include "grid.hpp"
#include "operators.hpp"
#include "runner.hpp"

using namespace degenkit;

struct dk_grid {
    GridPtr grid;
};
struct dk_function {
    GridFunction f;
};
struct dk_norm {
    NormSpec ns;
};
struct dk_expr {
    Expr e;
};
struct dk_operator {
    IntegralOperator op;
};
struct dk_report {
    std::string json;
    std::string csv;
    std::string verdict;
    std::string report_path;
    std::string csv_path;
};

namespace {

thread_local std::string last_error;

dk_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return DK_ERR_INVALID_ARGUMENT;
        case ErrorKind::GridMismatch: return DK_ERR_GRID_MISMATCH;
        case ErrorKind::Parse: return DK_ERR_PARSE;
        case ErrorKind::Domain: return DK_ERR_DOMAIN;
        case ErrorKind::Config: return DK_ERR_CONFIG;
        case ErrorKind::Numeric: return DK_ERR_NUMERIC;
    }
    return DK_ERR_INTERNAL;
}

template <class F>
dk_status guard(F&& body) {
    try {
        last_error.clear();
        body();
        return DK_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return DK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return DK_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (p == nullptr) fail(ErrorKind::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

VarSet varset_from(const char* vars) {
    VarSet set;
    for (const char* c = vars; *c; ++c) {
        switch (*c) {
            case 't': set = set.with(Var::t); break;
            case 's': set = set.with(Var::s); break;
            case 'u': set = set.with(Var::u); break;
            case 'v': set = set.with(Var::v); break;
            default: fail(ErrorKind::InvalidArgument, std::string("unknown variable letter '") + *c + "'");
        }
    }
    return set;
}

dk_status run_into(const nlohmann::json& config, const dk_run_options* options, dk_report** out) {
    RunOverrides ov;
    if (options != nullptr) {
        if (options->has_seed) ov.seed = options->seed;
        if (options->has_grid_n) ov.grid_n = options->grid_n;
        if (options->has_refinements) ov.refinements = options->refinements;
    }
    RunResult r = run_config(config, ov);
    auto rep = std::make_unique<dk_report>();
    rep->json = r.report.dump(2);
    rep->csv = std::move(r.csv);
    rep->verdict = r.report["verdict"].get<std::string>();
    rep->report_path = std::move(r.report_path);
    rep->csv_path = std::move(r.csv_path);
    *out = rep.release();
    return DK_OK;
}

void write_text(const char* path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, std::string("cannot open '") + path + "' for writing");
    f << text;
    if (!f) throw Error(ErrorKind::Config, std::string("failed writing '") + path + "'");
}

}  // namespace

extern "C" {

const char* dk_last_error(void) { return last_error.c_str(); }

const char* dk_status_name(dk_status status) {
    switch (status) {
        case DK_OK: return "ok";
        case DK_ERR_INVALID_ARGUMENT: return "invalid argument";
        case DK_ERR_GRID_MISMATCH: return "grid mismatch";
        case DK_ERR_PARSE: return "parse error";
        case DK_ERR_DOMAIN: return "domain error";
        case DK_ERR_CONFIG: return "config error";
        case DK_ERR_NUMERIC: return "numeric error";
        case DK_ERR_IO: return "io error";
        case DK_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* dk_version(void) { return "0.1.0"; }

int dk_exit_code(dk_status status) {
    switch (status) {
        case DK_OK: return 0;
        case DK_ERR_DOMAIN:
        case DK_ERR_NUMERIC:
        case DK_ERR_INTERNAL: return 3;
        default: return 2;
    }
}

void dk_string_free(char* s) { std::free(s); }

dk_status dk_grid_uniform(size_t n, double total, dk_grid** out) {
    return guard([&] {
        need(out, "out");
        *out = new dk_grid{Grid::uniform(n, total)};
    });
}

dk_status dk_grid_refine(const dk_grid* grid, dk_grid** out) {
    return guard([&] {
        need(grid, "grid");
        need(out, "out");
        *out = new dk_grid{refine(grid->grid).fine};
    });
}

size_t dk_grid_size(const dk_grid* grid) { return grid ? grid->grid->size() : 0; }

dk_status dk_grid_cell(const dk_grid* grid, size_t i, double* left, double* measure, double* representative) {
    return guard([&] {
        need(grid, "grid");
        if (i >= grid->grid->size()) fail(ErrorKind::InvalidArgument, "cell index out of range");
        const Cell& c = grid->grid->cell(i);
        if (left) *left = c.left;
        if (measure) *measure = c.measure;
        if (representative) *representative = c.representative;
    });
}

double dk_grid_total_measure(const dk_grid* grid) { return grid ? grid->grid->total_measure() : 0.0; }

void dk_grid_free(dk_grid* grid) { delete grid; }

dk_status dk_function_create(const dk_grid* grid, size_t dim, const double* values, size_t count, dk_function** out) {
    return guard([&] {
        need(grid, "grid");
        need(out, "out");
        if (count > 0) need(values, "values");
        if (dim == 0 || count != grid->grid->size() * dim) {
            fail(ErrorKind::InvalidArgument, "value count must equal cells * dim");
        }
        *out = new dk_function{GridFunction(grid->grid, dim, std::vector<double>(values, values + count))};
    });
}

dk_status dk_function_values(const dk_function* f, const double** values, size_t* count) {
    return guard([&] {
        need(f, "function");
        need(values, "values");
        need(count, "count");
        *values = f->f.values().data();
        *count = f->f.values().size();
    });
}

size_t dk_function_dim(const dk_function* f) { return f ? f->f.dim() : 0; }

void dk_function_free(dk_function* f) { delete f; }

dk_status dk_norm_lp(double p, dk_norm** out) {
    return guard([&] {
        need(out, "out");
        *out = new dk_norm{NormSpec::lp(p)};
    });
}

dk_status dk_norm_orlicz(const char* young, double t_max, dk_norm** out) {
    return guard([&] {
        need(young, "young");
        need(out, "out");
        *out = new dk_norm{NormSpec::orlicz(YoungFunction::from_text(young, t_max))};
    });
}

dk_status dk_norm_eval(const dk_function* f, const dk_norm* norm_spec, double* out) {
    return guard([&] {
        need(f, "function");
        need(norm_spec, "norm");
        need(out, "out");
        *out = norm(f->f, norm_spec->ns);
    });
}

void dk_norm_free(dk_norm* n) { delete n; }

dk_status dk_expr_parse(const char* text, const char* vars, dk_expr** out) {
    return guard([&] {
        need(text, "text");
        need(vars, "vars");
        need(out, "out");
        *out = new dk_expr{parse_expr(text, varset_from(vars))};
    });
}

dk_status dk_expr_eval(const dk_expr* e, const char* const* names, const double* values, size_t count, double* out) {
    return guard([&] {
        need(e, "expr");
        need(out, "out");
        if (count > 0) {
            need(names, "names");
            need(values, "values");
        }
        std::map<std::string, double> bindings;
        for (size_t i = 0; i < count; ++i) {
            need(names[i], "name");
            bindings[names[i]] = values[i];
        }
        *out = eval_expr(e->e, bindings);
    });
}

dk_status dk_expr_diff(const dk_expr* e, char var, dk_expr** out) {
    return guard([&] {
        need(e, "expr");
        need(out, "out");
        const char letters[2] = {var, '\0'};
        const VarSet one = varset_from(letters);
        Var v = Var::t;
        for (int k = 0; k < kVarCount; ++k) {
            if (one.contains(static_cast<Var>(k))) v = static_cast<Var>(k);
        }
        if (one.empty()) fail(ErrorKind::InvalidArgument, "missing variable");
        *out = new dk_expr{diff_expr(e->e, v)};
    });
}

dk_status dk_expr_print(const dk_expr* e, char** out) {
    return guard([&] {
        need(e, "expr");
        need(out, "out");
        *out = dup_string(e->e.to_string());
    });
}

void dk_expr_free(dk_expr* e) { delete e; }

dk_status dk_operator_create(const char* k0, const char* k1, const char* k2, const dk_grid* grid, dk_operator** out) {
    return guard([&] {
        need(grid, "grid");
        need(out, "out");
        KernelSpec spec = KernelSpec::parse(k0 ? k0 : "", k1 ? k1 : "", k2 ? k2 : "");
        if (spec.empty()) fail(ErrorKind::InvalidArgument, "at least one kernel is required");
        *out = new dk_operator{IntegralOperator(std::move(spec), grid->grid)};
    });
}

dk_status dk_operator_eval_g(const dk_operator* op, const dk_function* x1, const dk_function* x2, dk_function** out) {
    return guard([&] {
        need(op, "operator");
        need(x1, "x1");
        need(x2, "x2");
        need(out, "out");
        *out = new dk_function{op->op.eval_g(x1->f, x2->f)};
    });
}

dk_status dk_operator_eval_f(const dk_operator* op, const dk_function* x, dk_function** out) {
    return guard([&] {
        need(op, "operator");
        need(x, "x");
        need(out, "out");
        *out = new dk_function{op->op.eval_f(x->f)};
    });
}

void dk_operator_free(dk_operator* op) { delete op; }

dk_status dk_run_config_file(const char* path, const dk_run_options* options, dk_report** out) {
    dk_status s = DK_OK;
    const dk_status g = guard([&] {
        need(path, "path");
        need(out, "out");
        s = run_into(load_config_file(path), options, out);
    });
    return g != DK_OK ? g : s;
}

dk_status dk_run_config_json(const char* json_text, const dk_run_options* options, dk_report** out) {
    dk_status s = DK_OK;
    const dk_status g = guard([&] {
        need(json_text, "json");
        need(out, "out");
        s = run_into(parse_config_text(json_text), options, out);
    });
    return g != DK_OK ? g : s;
}

const char* dk_report_json(const dk_report* r) { return r ? r->json.c_str() : ""; }
const char* dk_report_csv(const dk_report* r) { return r ? r->csv.c_str() : ""; }
const char* dk_report_verdict(const dk_report* r) { return r ? r->verdict.c_str() : ""; }
const char* dk_report_default_path(const dk_report* r) { return r ? r->report_path.c_str() : ""; }
const char* dk_report_default_csv_path(const dk_report* r) { return r ? r->csv_path.c_str() : ""; }

dk_status dk_report_write(const dk_report* r, const char* json_path, const char* csv_path) {
    const dk_status s = guard([&] {
        need(r, "report");
        if (json_path && *json_path) write_text(json_path, r->json + "\n");
        if (csv_path && *csv_path) write_text(csv_path, r->csv);
    });
    return s == DK_ERR_CONFIG ? DK_ERR_IO : s;
}

void dk_report_free(dk_report* r) { delete r; }

const char* dk_list_probes(void) {
    static const std::string table = list_probes_table();
    return table.c_str();
}

size_t dk_probe_count(void) { return probe_registry().size(); }

}  // extern "C"
