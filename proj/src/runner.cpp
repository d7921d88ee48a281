#include "runner.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "errors.hpp"

namespace sdg {

Backend backend_from_string(const std::string& s) {
  if (s == "inproc") return Backend::InProc;
  if (s == "proc") return Backend::Proc;
  throw ConfigError("unknown backend '" + s + "' (expected inproc or proc)");
}

namespace {

struct RankOutcome {
  std::vector<int> gids;
  std::vector<double> field;
  double t_end = 0.0;
  double wall = 0.0;
  long rebuilds = 0;
  std::vector<TraceRow> trace;
};

RankOutcome run_rank(const Mesh& mesh, const Ownership& own, const NodeSet& ns,
                     const BasisOperators& basis, const SolverConfig& cfg,
                     Transport& transport, const RunnerOptions& opts) {
  LocalDomain dom = build_local_domain(mesh, own, transport.rank());
  RankSolver solver(mesh, own, std::move(dom), ns, basis, cfg, transport);
  solver.init_rank_maps();
  solver.set_initial_condition(opts.t0);

  const auto start = std::chrono::steady_clock::now();
  for (long s = 0; s < opts.n_steps; ++s) solver.step(opts.dt);
  const auto stop = std::chrono::steady_clock::now();

  if (opts.inject_collective) solver.inject_collective();

  RankOutcome out;
  out.t_end = solver.time();
  out.wall = std::chrono::duration<double>(stop - start).count();
  out.rebuilds = solver.total_rebuilds();
  for (const auto& el : solver.domain().elements) out.gids.push_back(el.gid);
  out.field.assign(solver.field().begin(), solver.field().end());
  out.trace = transport.trace();
  return out;
}

void scatter_into(GlobalField& gf, const RankOutcome& rk) {
  const std::size_t stride = gf.data.size() / gf.n_elements;
  for (std::size_t e = 0; e < rk.gids.size(); ++e)
    std::memcpy(gf.data.data() + rk.gids[e] * stride, rk.field.data() + e * stride,
                stride * sizeof(double));
}

RunOutput assemble(const Mesh& mesh, const NodeSet& ns, std::vector<RankOutcome>& ranks,
                   const RunnerOptions& opts) {
  RunOutput out;
  out.n_ranks = opts.n_ranks;
  out.n_steps = opts.n_steps;
  out.field.n1 = ns.count();
  out.field.n_elements = mesh.n_elements();
  out.field.data.assign(static_cast<std::size_t>(mesh.n_elements()) * ns.count() *
                            ns.count() * kNumVars,
                        0.0);
  for (int r = 0; r < static_cast<int>(ranks.size()); ++r) {
    scatter_into(out.field, ranks[r]);
    out.t_end = ranks[r].t_end;
    out.stats.push_back({r, ranks[r].wall, ranks[r].rebuilds});
    out.wall_max = std::max(out.wall_max, ranks[r].wall);
    out.trace.insert(out.trace.end(), ranks[r].trace.begin(), ranks[r].trace.end());
  }
  return out;
}

// ---- process backend serialization over a pipe ----

void write_doubles(int fd, const double* p, std::size_t n) {
  const char* c = reinterpret_cast<const char*>(p);
  std::size_t bytes = n * sizeof(double);
  while (bytes > 0) {
    const ssize_t w = ::write(fd, c, bytes);
    if (w < 0) {
      if (errno == EINTR) continue;
      std::abort();
    }
    c += w;
    bytes -= static_cast<std::size_t>(w);
  }
}

bool read_doubles(int fd, double* p, std::size_t n) {
  char* c = reinterpret_cast<char*>(p);
  std::size_t bytes = n * sizeof(double);
  while (bytes > 0) {
    const ssize_t r = ::read(fd, c, bytes);
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (r == 0) return false;
    c += r;
    bytes -= static_cast<std::size_t>(r);
  }
  return true;
}

void child_send_outcome(int fd, const RankOutcome& out) {
  std::vector<double> blob;
  blob.push_back(0.0);  // status ok
  blob.push_back(out.t_end);
  blob.push_back(out.wall);
  blob.push_back(static_cast<double>(out.rebuilds));
  blob.push_back(static_cast<double>(out.gids.size()));
  blob.push_back(static_cast<double>(out.field.size()));
  blob.push_back(static_cast<double>(out.trace.size()));
  for (int g : out.gids) blob.push_back(static_cast<double>(g));
  blob.insert(blob.end(), out.field.begin(), out.field.end());
  for (const auto& row : out.trace) {
    blob.push_back(static_cast<double>(row.step));
    blob.push_back(static_cast<double>(row.stage));
    blob.push_back(static_cast<double>(row.src));
    blob.push_back(static_cast<double>(row.dst));
    blob.push_back(static_cast<double>(row.bytes));
    blob.push_back(static_cast<double>(static_cast<int>(row.kind)));
    blob.push_back(row.is_send ? 1.0 : 0.0);
  }
  const double len = static_cast<double>(blob.size());
  write_doubles(fd, &len, 1);
  write_doubles(fd, blob.data(), blob.size());
}

void child_send_error(int fd, const std::string& msg) {
  std::vector<double> blob;
  blob.push_back(1.0);  // status error
  blob.push_back(static_cast<double>(msg.size()));
  for (char ch : msg) blob.push_back(static_cast<double>(ch));
  const double len = static_cast<double>(blob.size());
  write_doubles(fd, &len, 1);
  write_doubles(fd, blob.data(), blob.size());
}

RankOutcome parent_read_outcome(int fd) {
  double len = 0.0;
  if (!read_doubles(fd, &len, 1)) throw ProtocolError("worker produced no result");
  std::vector<double> blob(static_cast<std::size_t>(len));
  if (!read_doubles(fd, blob.data(), blob.size()))
    throw ProtocolError("worker result truncated");
  std::size_t k = 0;
  const int status = static_cast<int>(blob[k++]);
  if (status != 0) {
    const std::size_t msglen = static_cast<std::size_t>(blob[k++]);
    std::string msg(msglen, ' ');
    for (std::size_t i = 0; i < msglen; ++i) msg[i] = static_cast<char>(blob[k++]);
    throw std::runtime_error("worker failed: " + msg);
  }
  RankOutcome out;
  out.t_end = blob[k++];
  out.wall = blob[k++];
  out.rebuilds = static_cast<long>(blob[k++]);
  const std::size_t ngids = static_cast<std::size_t>(blob[k++]);
  const std::size_t nfield = static_cast<std::size_t>(blob[k++]);
  const std::size_t ntrace = static_cast<std::size_t>(blob[k++]);
  out.gids.resize(ngids);
  for (std::size_t i = 0; i < ngids; ++i) out.gids[i] = static_cast<int>(blob[k++]);
  out.field.assign(blob.begin() + k, blob.begin() + k + nfield);
  k += nfield;
  out.trace.resize(ntrace);
  for (auto& row : out.trace) {
    row.step = static_cast<int>(blob[k++]);
    row.stage = static_cast<int>(blob[k++]);
    row.src = static_cast<int>(blob[k++]);
    row.dst = static_cast<int>(blob[k++]);
    row.bytes = static_cast<std::uint64_t>(blob[k++]);
    row.kind = static_cast<MsgKind>(static_cast<int>(blob[k++]));
    row.is_send = blob[k++] != 0.0;
  }
  return out;
}

RunOutput run_inproc(const Mesh& mesh, const NodeSet& ns, const BasisOperators& basis,
                     const SolverConfig& cfg, const RunnerOptions& opts,
                     const Ownership& own) {
  InProcHub hub(opts.n_ranks);
  std::vector<RankOutcome> outcomes(opts.n_ranks);
  std::vector<std::exception_ptr> errors(opts.n_ranks);
  std::vector<std::thread> workers;
  workers.reserve(opts.n_ranks);
  for (int r = 0; r < opts.n_ranks; ++r) {
    workers.emplace_back([&, r] {
      try {
        InProcTransport transport(hub, r);
        outcomes[r] = run_rank(mesh, own, ns, basis, cfg, transport, opts);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return assemble(mesh, ns, outcomes, opts);
}

RunOutput run_proc(const Mesh& mesh, const NodeSet& ns, const BasisOperators& basis,
                   const SolverConfig& cfg, const RunnerOptions& opts,
                   const Ownership& own) {
  const int R = opts.n_ranks;
  // Full-duplex stream pair per rank pair.
  std::vector<std::vector<int>> fds(R, std::vector<int>(R, -1));
  for (int i = 0; i < R; ++i)
    for (int j = i + 1; j < R; ++j) {
      int sp[2];
      if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sp) != 0)
        throw ProtocolError("socketpair failed");
      fds[i][j] = sp[0];
      fds[j][i] = sp[1];
    }
  std::vector<int> result_r(R, -1), result_w(R, -1);
  for (int r = 0; r < R; ++r) {
    int pipefd[2];
    if (::pipe(pipefd) != 0) throw ProtocolError("pipe failed");
    result_r[r] = pipefd[0];
    result_w[r] = pipefd[1];
  }

  std::vector<pid_t> pids(R);
  for (int r = 0; r < R; ++r) {
    const pid_t pid = ::fork();
    if (pid < 0) throw ProtocolError("fork failed");
    if (pid == 0) {
      // Child: keep only this rank's fds.
      for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j)
          if (fds[i][j] >= 0 && i != r && j != r) ::close(fds[i][j]);
      for (int i = 0; i < R; ++i) {
        if (i != r && result_r[i] >= 0) ::close(result_r[i]);
        if (i != r && result_w[i] >= 0) ::close(result_w[i]);
      }
      ::close(result_r[r]);
      // fds[r][j] is this rank's endpoint to peer j; fds[i][r] belongs to peer i.
      std::vector<int> peers(R, -1);
      for (int j = 0; j < R; ++j)
        if (j != r) {
          peers[j] = fds[r][j];
          if (fds[j][r] >= 0) ::close(fds[j][r]);
        }
      int status = 0;
      try {
        SocketTransport transport(r, std::move(peers));
        const RankOutcome out = run_rank(mesh, own, ns, basis, cfg, transport, opts);
        child_send_outcome(result_w[r], out);
      } catch (const std::exception& e) {
        child_send_error(result_w[r], e.what());
        status = 1;
      }
      ::close(result_w[r]);
      ::_exit(status);
    }
    pids[r] = pid;
  }

  // Parent owns no channel endpoints.
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      if (fds[i][j] >= 0) ::close(fds[i][j]);
  for (int r = 0; r < R; ++r) ::close(result_w[r]);

  std::vector<RankOutcome> outcomes(R);
  std::exception_ptr first_error;
  for (int r = 0; r < R; ++r) {
    try {
      outcomes[r] = parent_read_outcome(result_r[r]);
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
    ::close(result_r[r]);
  }
  for (int r = 0; r < R; ++r) {
    int status = 0;
    ::waitpid(pids[r], &status, 0);
  }
  if (first_error) std::rethrow_exception(first_error);
  return assemble(mesh, ns, outcomes, opts);
}

}  // namespace

RunOutput run_simulation(const Mesh& mesh, const NodeSet& ns, const BasisOperators& basis,
                         const SolverConfig& cfg, const RunnerOptions& opts) {
  if (opts.n_steps > 0 && !(opts.dt > 0.0)) throw ConfigError("runner needs a positive dt");
  const Ownership own = assign_ranks(mesh, opts.n_ranks);
  if (opts.backend == Backend::InProc) return run_inproc(mesh, ns, basis, cfg, opts, own);
  return run_proc(mesh, ns, basis, cfg, opts, own);
}

}  // namespace sdg
