#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamesynth/formula.hpp"

namespace gamesynth {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    std::vector<std::string> command;   // argv of the solver process (reads SMT-LIB 2 on stdin)
    int timeout_ms = 30000;             // per-query budget
};

// Resolution order: GAMESYNTH_SOLVER env (whitespace-split), `z3` on PATH,
// the bundled Node/WASM shim.  Throws SolverError if nothing is available.
SolverConfig default_solver_config();

struct SatResult {
    enum class Kind { Sat, Unsat, Unknown };
    Kind kind = Kind::Unknown;
    Assignment model;       // populated on Sat, projected onto the requested vars
    std::string reason;     // populated on Unknown

    bool is_sat() const { return kind == Kind::Sat; }
    bool is_unsat() const { return kind == Kind::Unsat; }
    bool is_unknown() const { return kind == Kind::Unknown; }
};

struct EnumResult {
    bool over_cap = false;              // true: cap exceeded, `models` holds the first cap models
    std::vector<Assignment> models;
};

// One solver process, SMT-LIB 2 over pipes.  Game variables are declared in
// the base scope; every query runs inside its own push/pop, so sessions are
// reusable across many queries.
//
// The protocol is checked end to end: every exchange is framed with an
// (echo "gsync-N") marker, so a dropped, garbled, or stale reply is detected
// as a marker mismatch rather than misread as an answer.  Any such anomaly
// (or an error reply, or the process dying) poisons the session: it is killed
// and respawned with its declarations replayed, and the query is retried a
// bounded number of times before the failure surfaces as SolverError.  A
// query that produces no output at all within the wallclock backstop is
// treated as an honest timeout and reported as Unknown instead.
class Session {
public:
    explicit Session(SolverConfig cfg = default_solver_config());
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    void declare_var(const VarRef& v);              // base-scope Int constant
    void declare_vars(const std::vector<std::string>& names, bool with_primed = true);

    // Check satisfiability of the conjunction; on Sat the model is read back
    // for `project` (declared variables only).
    SatResult check(const std::vector<Formula>& assertions, const std::vector<VarRef>& project);
    // Same, but assertions are raw SMT-LIB terms (for quantified queries).
    SatResult check_raw(const std::vector<std::string>& assertions, const std::vector<VarRef>& project);

    // Enumerate up to cap+1 models projected onto `project`, blocking each in
    // turn.  Distinct projections only.  Throws SolverError on Unknown.
    EnumResult enumerate_models(const std::vector<Formula>& assertions,
                                const std::vector<VarRef>& project, int cap);

    const SolverConfig& config() const { return cfg_; }
    int respawn_count() const { return respawns_; }
    int glitch_count() const { return glitches_; }

private:
    struct Pipe {
        int in = -1, out = -1;      // parent's write / read ends
        long pid = -1;
    };

    void spawn();                   // retries the fork+handshake a few times
    void spawn_once();
    void shutdown(bool send_exit);
    void respawn();
    void send(const std::string& text);
    // Read one reply s-expression or status word; empty optional on timeout/EOF.
    std::optional<std::string> read_reply(int deadline_ms);
    std::string next_marker();
    // Read the next unit and require it to be exactly `marker`.
    void expect_marker(const std::string& marker, int deadline_ms);
    SatResult run_query(const std::vector<std::string>& assertions, const std::vector<VarRef>& project);
    SatResult run_query_once(const std::vector<std::string>& assertions,
                             const std::vector<VarRef>& project, bool& honest_timeout,
                             std::string& timeout_reason);
    EnumResult enumerate_once(const std::vector<std::string>& rendered,
                              const std::vector<VarRef>& project, int cap);

    void log_traffic(const char* dir, const std::string& text);

    SolverConfig cfg_;
    Pipe pipe_;
    std::vector<VarRef> declared_;
    std::string rxbuf_;
    long marker_seq_ = 0;
    int respawns_ = 0;
    int glitches_ = 0;
    bool alive_ = false;
};

} // namespace gamesynth
