#include "gamesynth/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>

#include "gamesynth/buildinfo.hpp"
#include "gamesynth/sexpr.hpp"

namespace gamesynth {

namespace {

bool file_exists(const std::string& p) {
    struct stat st{};
    return stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode);
}

bool on_path(const std::string& prog) {
    const char* path = getenv("PATH");
    if (!path) return false;
    std::stringstream ss{std::string(path)};
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        std::string full = dir + "/" + prog;
        if (access(full.c_str(), X_OK) == 0) return true;
    }
    return false;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::stringstream ss{s};
    std::vector<std::string> out;
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

// A protocol-level anomaly: error reply, marker mismatch, truncated stream,
// or the process dying mid-query.  The query itself is still well-posed, so
// callers respawn the session and retry before giving up.  File-local:
// everything that escapes the session is a SolverError.
struct ProtoGlitch {
    std::string why;
};

} // namespace

SolverConfig default_solver_config() {
    SolverConfig cfg;
    if (const char* env = getenv("GAMESYNTH_SOLVER")) {
        cfg.command = split_ws(env);
        if (!cfg.command.empty()) return cfg;
    }
    if (on_path("z3")) {
        cfg.command = {"z3", "-in"};
        return cfg;
    }
    if (const char* shim = getenv("GAMESYNTH_Z3_SHIM"); shim && file_exists(shim)) {
        cfg.command = {"node", shim};
        return cfg;
    }
    if (file_exists(GAMESYNTH_SHIM_JS)) {
        cfg.command = {"node", GAMESYNTH_SHIM_JS};
        return cfg;
    }
    throw SolverError("no SMT solver available: set GAMESYNTH_SOLVER, put z3 on PATH, "
                      "or run npm install in tools/z3shim");
}

// --- process plumbing --------------------------------------------------------

Session::Session(SolverConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.command.empty()) throw SolverError("empty solver command");
    signal(SIGPIPE, SIG_IGN);
    spawn();
}

Session::~Session() {
    try {
        shutdown(true);
    } catch (...) {
    }
}

void Session::spawn() {
    std::string last;
    for (int attempt = 0; attempt < 3; attempt++) {
        try {
            spawn_once();
            return;
        } catch (const SolverError& e) {
            last = e.what();
        }
    }
    throw SolverError(last);
}

void Session::spawn_once() {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw SolverError("pipe() failed: " + std::string(strerror(errno)));

    pid_t pid = fork();
    if (pid < 0) throw SolverError("fork() failed: " + std::string(strerror(errno)));
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> argv;
        for (const std::string& a : cfg_.command) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    pipe_ = {to_child[1], from_child[0], pid};
    rxbuf_.clear();
    alive_ = true;

    // Base scope: logic, per-query solver-side timeout, then any declarations
    // this session accumulated before a respawn.  The trailing ping check-sat
    // frames the whole prelude: a declaration that errored would surface as a
    // non-"sat" unit here, failing the handshake (and triggering a respawn
    // attempt) instead of corrupting later queries.
    try {
        std::string prelude = "(set-logic ALL)\n(set-option :timeout " + std::to_string(cfg_.timeout_ms) + ")\n";
        for (const VarRef& v : declared_) prelude += "(declare-const " + wire_name(v) + " Int)\n";
        prelude += "(check-sat)\n";
        send(prelude);
        auto pong = read_reply(std::max(cfg_.timeout_ms, 60000));
        if (!pong || *pong != "sat") {
            shutdown(false);
            throw SolverError("solver handshake failed for '" + cfg_.command[0] + "'" +
                              (pong ? " (got '" + *pong + "')" : " (no reply)"));
        }
    } catch (const ProtoGlitch& g) {
        shutdown(false);
        throw SolverError("solver handshake failed for '" + cfg_.command[0] + "': " + g.why);
    }
}

void Session::shutdown(bool send_exit) {
    if (pipe_.pid < 0) return;
    if (alive_ && send_exit) {
        ssize_t ignored = ::write(pipe_.in, "(exit)\n", 7);
        (void)ignored;
    }
    close(pipe_.in);
    close(pipe_.out);
    pid_t pid = static_cast<pid_t>(pipe_.pid);
    int status = 0;
    for (int i = 0; i < 20; i++) {
        if (waitpid(pid, &status, WNOHANG) != 0) {
            pipe_ = {};
            alive_ = false;
            return;
        }
        usleep(50 * 1000);
    }
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    pipe_ = {};
    alive_ = false;
}

void Session::respawn() {
    shutdown(false);
    respawns_++;
    spawn();
}

// Optional traffic log for debugging protocol issues: set GAMESYNTH_SOLVER_LOG
// to a file path and every byte sent/received is appended with a direction tag.
void Session::log_traffic(const char* dir, const std::string& text) {
    static const char* path = getenv("GAMESYNTH_SOLVER_LOG");
    if (!path) return;
    FILE* f = fopen(path, "a");
    if (!f) return;
    fprintf(f, "\n--- %s pid=%ld ---\n", dir, pipe_.pid);
    fwrite(text.data(), 1, text.size(), f);
    fclose(f);
}

void Session::send(const std::string& text) {
    log_traffic("tx", text);
    size_t off = 0;
    while (off < text.size()) {
        ssize_t n = ::write(pipe_.in, text.data() + off, text.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            alive_ = false;
            throw ProtoGlitch{"write to solver failed: " + std::string(strerror(errno))};
        }
        off += static_cast<size_t>(n);
    }
}

// Extract one complete reply unit from the receive buffer: either a bare word
// (sat/unsat/unknown, echo markers) or a balanced s-expression.  Parens inside
// double-quoted strings (error messages) don't count toward the balance.
static std::optional<std::string> take_unit(std::string& buf) {
    size_t i = 0;
    while (i < buf.size() && isspace(static_cast<unsigned char>(buf[i]))) i++;
    if (i == buf.size()) {
        buf.clear();
        return std::nullopt;
    }
    if (buf[i] == '(') {
        int depth = 0;
        bool in_string = false;
        for (size_t j = i; j < buf.size(); j++) {
            char c = buf[j];
            if (in_string) {
                if (c == '"') {
                    if (j + 1 < buf.size() && buf[j + 1] == '"') j++; // escaped quote
                    else in_string = false;
                }
            } else if (c == '"') {
                in_string = true;
            } else if (c == '(') {
                depth++;
            } else if (c == ')' && --depth == 0) {
                std::string unit = buf.substr(i, j - i + 1);
                buf.erase(0, j + 1);
                return unit;
            }
        }
        return std::nullopt; // incomplete
    }
    size_t j = i;
    while (j < buf.size() && !isspace(static_cast<unsigned char>(buf[j]))) j++;
    if (j == buf.size()) return std::nullopt; // word may continue
    std::string unit = buf.substr(i, j - i);
    buf.erase(0, j);
    return unit;
}

std::optional<std::string> Session::read_reply(int deadline_ms) {
    auto start = std::chrono::steady_clock::now();
    for (;;) {
        if (auto unit = take_unit(rxbuf_)) return unit;
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        int remain = deadline_ms - static_cast<int>(elapsed);
        if (remain <= 0) return std::nullopt;
        struct pollfd pfd{pipe_.out, POLLIN, 0};
        int rc = poll(&pfd, 1, remain);
        if (rc == 0) return std::nullopt;
        if (rc < 0) {
            if (errno == EINTR) continue;
            alive_ = false;
            throw ProtoGlitch{"poll on solver failed: " + std::string(strerror(errno))};
        }
        char chunk[4096];
        ssize_t n = ::read(pipe_.out, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            alive_ = false;
            throw ProtoGlitch{"read from solver failed: " + std::string(strerror(errno))};
        }
        if (n == 0) {
            alive_ = false;
            return std::nullopt; // EOF: solver died
        }
        log_traffic("rx", std::string(chunk, static_cast<size_t>(n)));
        rxbuf_.append(chunk, static_cast<size_t>(n));
    }
}

// --- framing ------------------------------------------------------------------

std::string Session::next_marker() {
    return "gsync-" + std::to_string(++marker_seq_);
}

void Session::expect_marker(const std::string& marker, int deadline_ms) {
    auto unit = read_reply(deadline_ms);
    if (!unit) {
        if (!alive_) throw ProtoGlitch{"solver process died before marker " + marker};
        throw ProtoGlitch{"no marker " + marker + " within deadline"};
    }
    if (*unit != marker)
        throw ProtoGlitch{"expected marker " + marker + ", got '" + *unit + "'"};
}

// --- declarations ------------------------------------------------------------

void Session::declare_var(const VarRef& v) {
    for (const VarRef& d : declared_)
        if (d == v) return;
    declared_.push_back(v);
    if (!alive_) {
        respawn();  // respawn replays all declarations under the handshake ping
        return;
    }
    try {
        std::string m = next_marker();
        send("(declare-const " + wire_name(v) + " Int)\n(echo \"" + m + "\")\n");
        expect_marker(m, cfg_.timeout_ms + 20000);
    } catch (const ProtoGlitch&) {
        glitches_++;
        respawn();
    }
}

void Session::declare_vars(const std::vector<std::string>& names, bool with_primed) {
    for (const std::string& n : names) {
        declare_var({n, false});
        if (with_primed) declare_var({n, true});
    }
}

// --- queries -----------------------------------------------------------------

static Int parse_model_value(const Sexpr& e) {
    if (e.is_atom()) {
        try {
            return std::stoll(e.text);
        } catch (...) {
            throw SolverError("unparseable model value '" + e.text + "'");
        }
    }
    // (- N)
    if (e.size() == 2 && e[0].is_atom() && e[0].text == "-" && e[1].is_atom())
        return -parse_model_value(e[1]);
    throw SolverError("unexpected model value shape '" + sexpr_to_string(e) + "'");
}

// Parse a get-value reply into `model`; throws ProtoGlitch on any malformed
// shape (corruption, not a usage error).
static void parse_model_reply(const std::string& text, const std::vector<VarRef>& project,
                              Assignment& model) {
    Sexpr parsed;
    try {
        parsed = read_one_sexpr(text);
    } catch (const ParseError& pe) {
        throw ProtoGlitch{std::string("bad get-value reply: ") + pe.what()};
    }
    if (parsed.is_atom() || parsed.size() != project.size())
        throw ProtoGlitch{"get-value reply arity mismatch: " + text};
    try {
        for (const Sexpr& pair : parsed.items) {
            if (pair.is_atom() || pair.size() != 2 || !pair[0].is_atom())
                throw SolverError("bad model pair: " + sexpr_to_string(pair));
            model.set(from_wire_name(pair[0].text), parse_model_value(pair[1]));
        }
    } catch (const SolverError& e) {
        throw ProtoGlitch{e.what()};
    }
}

static std::string get_value_command(const std::vector<VarRef>& project) {
    std::string gv = "(get-value (";
    for (size_t i = 0; i < project.size(); i++) {
        if (i) gv += " ";
        gv += wire_name(project[i]);
    }
    gv += "))\n";
    return gv;
}

SatResult Session::run_query(const std::vector<std::string>& assertions,
                             const std::vector<VarRef>& project) {
    const int attempts = 4;
    std::string last;
    for (int a = 0; a < attempts; a++) {
        try {
            if (!alive_) respawn();
            bool honest_timeout = false;
            std::string timeout_reason;
            SatResult res = run_query_once(assertions, project, honest_timeout, timeout_reason);
            if (honest_timeout) {
                respawn();  // wedged process: replace it, report Unknown honestly
                return {SatResult::Kind::Unknown, {}, timeout_reason};
            }
            return res;
        } catch (const ProtoGlitch& g) {
            last = g.why;
            glitches_++;
            respawn();
        }
    }
    throw SolverError("solver query failed after " + std::to_string(attempts) +
                      " attempts: " + last);
}

SatResult Session::run_query_once(const std::vector<std::string>& assertions,
                                  const std::vector<VarRef>& project, bool& honest_timeout,
                                  std::string& timeout_reason) {
    std::string m1 = next_marker();
    std::string q = "(push 1)\n";
    for (const std::string& a : assertions) q += "(assert " + a + ")\n";
    q += "(check-sat)\n(echo \"" + m1 + "\")\n";
    send(q);

    // Solver-side timeout should answer `unknown` within cfg_.timeout_ms; the
    // backstop catches a wedged process.  Silence with an empty receive buffer
    // is an honest timeout; silence with partial bytes is a corrupted stream.
    int backstop = cfg_.timeout_ms + 20000;
    auto word = read_reply(backstop);
    if (!word) {
        if (!alive_) throw ProtoGlitch{"solver process died"};
        if (!rxbuf_.empty()) throw ProtoGlitch{"truncated reply at deadline: '" + rxbuf_ + "'"};
        honest_timeout = true;
        timeout_reason = "query timed out (solver killed)";
        return {};
    }

    SatResult res;
    if (*word == "unsat") {
        res.kind = SatResult::Kind::Unsat;
    } else if (*word == "unknown") {
        res.kind = SatResult::Kind::Unknown;
        res.reason = "solver returned unknown";
    } else if (*word == "sat") {
        res.kind = SatResult::Kind::Sat;
    } else {
        throw ProtoGlitch{"unexpected solver reply '" + *word + "'"};
    }
    expect_marker(m1, backstop);

    if (res.is_sat() && !project.empty()) {
        std::string m2 = next_marker();
        send(get_value_command(project) + "(echo \"" + m2 + "\")\n");
        auto vals = read_reply(backstop);
        if (!vals) throw ProtoGlitch{"no reply to get-value"};
        parse_model_reply(*vals, project, res.model);
        expect_marker(m2, backstop);
    }

    std::string m3 = next_marker();
    send("(pop 1)\n(echo \"" + m3 + "\")\n");
    expect_marker(m3, backstop);
    return res;
}

SatResult Session::check(const std::vector<Formula>& assertions, const std::vector<VarRef>& project) {
    std::vector<std::string> rendered;
    rendered.reserve(assertions.size());
    for (const Formula& f : assertions) rendered.push_back(render(f));
    return run_query(rendered, project);
}

SatResult Session::check_raw(const std::vector<std::string>& assertions,
                             const std::vector<VarRef>& project) {
    return run_query(assertions, project);
}

EnumResult Session::enumerate_models(const std::vector<Formula>& assertions,
                                     const std::vector<VarRef>& project, int cap) {
    if (project.empty()) throw SolverError("enumerate_models needs a nonempty projection");
    if (cap <= 0) throw SolverError("enumerate_models needs a positive cap");

    std::vector<std::string> rendered;
    rendered.reserve(assertions.size());
    for (const Formula& f : assertions) rendered.push_back(render(f));

    // A glitch mid-enumeration invalidates the accumulated blocking clauses;
    // restart the whole enumeration on a fresh process.
    const int attempts = 3;
    std::string last;
    for (int a = 0; a < attempts; a++) {
        try {
            if (!alive_) respawn();
            return enumerate_once(rendered, project, cap);
        } catch (const ProtoGlitch& g) {
            last = g.why;
            glitches_++;
            respawn();
        }
    }
    throw SolverError("model enumeration failed after " + std::to_string(attempts) +
                      " attempts: " + last);
}

EnumResult Session::enumerate_once(const std::vector<std::string>& rendered,
                                   const std::vector<VarRef>& project, int cap) {
    int backstop = cfg_.timeout_ms + 20000;

    std::string m0 = next_marker();
    std::string q = "(push 1)\n";
    for (const std::string& a : rendered) q += "(assert " + a + ")\n";
    q += "(echo \"" + m0 + "\")\n";
    send(q);
    expect_marker(m0, backstop);

    EnumResult out;
    for (;;) {
        std::string mc = next_marker();
        send("(check-sat)\n(echo \"" + mc + "\")\n");
        auto word = read_reply(backstop);
        if (!word) {
            if (!alive_) throw ProtoGlitch{"solver process died"};
            if (!rxbuf_.empty()) throw ProtoGlitch{"truncated reply at deadline"};
            // An honest timeout can't be retried into an answer, and a partial
            // enumeration must not be mistaken for an exhaustive one.
            respawn();
            throw SolverError("model enumeration timed out after " +
                              std::to_string(out.models.size()) + " models");
        }
        if (*word == "unknown") {
            expect_marker(mc, backstop);
            std::string mp = next_marker();
            send("(pop 1)\n(echo \"" + mp + "\")\n");
            expect_marker(mp, backstop);
            throw SolverError("model enumeration gave up: solver returned unknown after " +
                              std::to_string(out.models.size()) + " models");
        }
        if (*word == "unsat") {
            expect_marker(mc, backstop);
            break;
        }
        if (*word != "sat") throw ProtoGlitch{"unexpected solver reply '" + *word + "'"};
        expect_marker(mc, backstop);

        std::string mv = next_marker();
        send(get_value_command(project) + "(echo \"" + mv + "\")\n");
        auto vals = read_reply(backstop);
        if (!vals) throw ProtoGlitch{"no reply to get-value"};
        Assignment m;
        parse_model_reply(*vals, project, m);
        expect_marker(mv, backstop);

        if (static_cast<int>(out.models.size()) == cap) {
            out.over_cap = true;
            break;
        }
        out.models.push_back(m);

        // Block this projection and continue.
        std::vector<Formula> lits;
        lits.reserve(project.size());
        for (const VarRef& v : project)
            lits.push_back(Formula::negate(
                Formula::cmp(CmpOp::Eq, Term::var(v.name, v.primed), Term::int_const(m.get(v)))));
        std::string mb = next_marker();
        send("(assert " + render(Formula::disj(std::move(lits))) + ")\n(echo \"" + mb + "\")\n");
        expect_marker(mb, backstop);
    }
    std::string mp = next_marker();
    send("(pop 1)\n(echo \"" + mp + "\")\n");
    expect_marker(mp, backstop);
    return out;
}

} // namespace gamesynth
