#pragma once
/* Scenario files: declarations of coordinates, fields, operators, densities,
 * and equations, followed by a task list.  Parsing binds every name, task
 * execution produces a deterministic report. */

#include "varlie/gauge.hpp"
#include "varlie/search.hpp"

#include <memory>

namespace varlie {

struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string message;
};

std::string format_diagnostics(const std::string& file,
                               const std::vector<Diagnostic>& diags);

struct Scenario {
  std::shared_ptr<Context> ctx;

  std::map<std::string, TotalDiffOperator> ops;
  std::map<std::string, Poly> densities;

  struct Equation {
    enum Kind { EulerTuple, NormalForm };
    Kind kind = EulerTuple;
    std::vector<int> qcodes; /* EulerTuple: variables of the variation */
    std::vector<Poly> F;     /* EulerTuple: one polynomial per variable */
    EquationNormalForm normal;
  };
  std::map<std::string, Equation> equations;

  struct Collection {
    OperatorCollection C;
    std::vector<std::vector<int>> ghosts; /* one odd code list per operator */
    std::vector<int> args;                /* the two section carriers */
    std::vector<int> antifields;          /* conjugate to the target */
    std::vector<std::vector<int>> ghost_antifields;
    bool has_antifields = false;
  };
  std::map<std::string, Collection> collections;

  struct Task {
    std::string kind;    /* check-hamiltonian, extract-christoffel, ... */
    std::string heading; /* canonical one-line description */
    std::string a, b, c, d; /* name operands, meaning fixed per kind */
    Poly expr;
    bool has_expr = false;
    bool mod_div = false;
    bool formal = false;
    bool families = false;
    bool up_to = false; /* search: all weights up to the bound */
    int weight = 0;
    int order = -1; /* per-task order bound, -1 for the shared default */
    int line = 1, col = 1;
  };
  std::vector<Task> tasks;
};

struct ParseResult {
  bool ok = false;
  std::shared_ptr<Scenario> scenario;
  std::vector<Diagnostic> diags;
};

/* recursive-descent parse with interleaved binding; reports lexical,
 * syntactic, and undeclared-symbol errors with line/column spans */
ParseResult parse_scenario(const std::string& source);

struct TaskResult {
  std::string kind;
  std::string heading;
  std::string status; /* pass | fail | inconclusive */
  std::vector<std::pair<std::string, std::string>> objects;
  std::string block; /* preformatted multi-line payload (search tables) */
  int order_bound = -1;
  long elapsed_ms = 0;
};

struct Report {
  std::string scenario;
  std::vector<TaskResult> tasks;
  int npass = 0, nfail = 0, ninconclusive = 0;
  /* 0 all pass, 1 any fail, 2 inconclusive but no fail */
  int exit_code() const;
};

struct RunFlags {
  int order_bound = -1; /* overrides tasks without an explicit bound */
  int jobs = 0;         /* 0 keeps the current worker setting */
  bool timing = false;
};

/* executes the tasks in file order; solver-bound exhaustion is reported as
 * inconclusive, never as a silent pass */
Report run_scenario(const Scenario& sc, const RunFlags& flags = {});

/* plain-text report; byte-identical across runs unless timing is shown */
std::string render_text(const Report& r, bool timing = false);
/* the same report as a structured tree (JSON) */
std::string render_tree(const Report& r, bool timing = false);

/* search result tables in the two report formats */
std::string render_search_tree(const std::vector<WeightReport>& reports);

}  // namespace varlie
