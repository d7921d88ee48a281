#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace sdg {

enum class MsgKind : std::uint32_t {
  InitRankMaps = 1,  // the one collective, init phase only
  SolutionConf = 2,
  SolutionMortar = 3,
  LiftConf = 4,
  LiftMortar = 5,
  GradConf = 6,
  GradMortar = 7,
  FluxConf = 8,
  FluxMortar = 9,
  Diag = 10,  // post-run result collection, outside the audit window
};

const char* to_string(MsgKind k);

/// One line of the communication trace; `step < 0` marks the init phase.
struct TraceRow {
  int step = 0;
  int stage = 0;
  int src = 0;
  int dst = 0;
  std::uint64_t bytes = 0;
  MsgKind kind = MsgKind::Diag;
  bool is_send = false;
};

/// Point-to-point ordered reliable message passing between ranks.
///
/// Sends are buffered and non-blocking. Receives complete in FIFO channel
/// order; try_recv is the completion test. Every rank records its own trace.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int size() const = 0;

  virtual void send(int dst, MsgKind kind, const std::vector<double>& payload) = 0;

  /// Succeeds iff the head of the src channel carries `kind`. A head of a
  /// different kind means the protocol phase order was violated.
  virtual bool try_recv(int src, MsgKind kind, std::vector<double>& out) = 0;

  /// Blocking receive built on the completion test.
  std::vector<double> recv(int src, MsgKind kind);

  /// Init-phase collective: every rank contributes a payload and receives
  /// all ranks' contributions (own included), indexed by rank.
  std::vector<std::vector<double>> allgather(const std::vector<double>& mine);

  void set_context(int step, int stage) {
    step_ = step;
    stage_ = stage;
  }
  const std::vector<TraceRow>& trace() const { return trace_; }
  std::vector<TraceRow>& trace() { return trace_; }

 protected:
  virtual void wait_for_data(int src) = 0;

  void record(int src, int dst, std::uint64_t bytes, MsgKind kind, bool is_send) {
    trace_.push_back({step_, stage_, src, dst, bytes, kind, is_send});
  }

  int step_ = -1;  // init phase until the runner sets a step
  int stage_ = 0;
  std::vector<TraceRow> trace_;
};

/// Shared channel state for in-process ranks (one worker thread per rank).
class InProcHub {
 public:
  explicit InProcHub(int n_ranks);

  struct Message {
    MsgKind kind;
    std::vector<double> payload;
  };
  struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Message> q;
  };

  Channel& channel(int src, int dst) { return chans_[src * n_ + dst]; }
  int size() const { return n_; }

 private:
  int n_;
  std::deque<Channel> chans_;  // deque: Channel is not movable
};

class InProcTransport : public Transport {
 public:
  InProcTransport(InProcHub& hub, int rank) : hub_(&hub), rank_(rank) {}

  int rank() const override { return rank_; }
  int size() const override { return hub_->size(); }
  void send(int dst, MsgKind kind, const std::vector<double>& payload) override;
  bool try_recv(int src, MsgKind kind, std::vector<double>& out) override;

 protected:
  void wait_for_data(int src) override;

 private:
  InProcHub* hub_;
  int rank_;
};

/// Stream-socket transport over pre-connected full-duplex fds, one per peer.
/// Message framing: u32 kind, u32 magic, u64 double count, then the payload.
class SocketTransport : public Transport {
 public:
  SocketTransport(int rank, std::vector<int> peer_fds);
  ~SocketTransport() override;

  int rank() const override { return rank_; }
  int size() const override { return static_cast<int>(fds_.size()); }
  void send(int dst, MsgKind kind, const std::vector<double>& payload) override;
  bool try_recv(int src, MsgKind kind, std::vector<double>& out) override;

 protected:
  void wait_for_data(int src) override;

 private:
  void pump(int src);

  int rank_;
  std::vector<int> fds_;
  struct RxState {
    std::vector<char> buf;
    std::deque<InProcHub::Message> q;
    bool closed = false;
  };
  std::vector<RxState> rx_;
};

}  // namespace sdg
