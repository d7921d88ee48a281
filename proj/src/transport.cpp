#include "transport.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "errors.hpp"

namespace sdg {

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::InitRankMaps: return "init_rank_maps";
    case MsgKind::SolutionConf: return "solution_conf";
    case MsgKind::SolutionMortar: return "solution_mortar";
    case MsgKind::LiftConf: return "lift_conf";
    case MsgKind::LiftMortar: return "lift_mortar";
    case MsgKind::GradConf: return "grad_conf";
    case MsgKind::GradMortar: return "grad_mortar";
    case MsgKind::FluxConf: return "flux_conf";
    case MsgKind::FluxMortar: return "flux_mortar";
    case MsgKind::Diag: return "diag";
  }
  return "unknown";
}

std::vector<double> Transport::recv(int src, MsgKind kind) {
  std::vector<double> out;
  while (!try_recv(src, kind, out)) wait_for_data(src);
  return out;
}

std::vector<std::vector<double>> Transport::allgather(const std::vector<double>& mine) {
  std::vector<std::vector<double>> all(size());
  all[rank()] = mine;
  for (int r = 0; r < size(); ++r)
    if (r != rank()) send(r, MsgKind::InitRankMaps, mine);
  for (int r = 0; r < size(); ++r)
    if (r != rank()) all[r] = recv(r, MsgKind::InitRankMaps);
  return all;
}

InProcHub::InProcHub(int n_ranks) : n_(n_ranks), chans_(n_ranks * n_ranks) {}

void InProcTransport::send(int dst, MsgKind kind, const std::vector<double>& payload) {
  record(rank_, dst, payload.size() * sizeof(double), kind, true);
  auto& ch = hub_->channel(rank_, dst);
  {
    std::lock_guard<std::mutex> lk(ch.mu);
    ch.q.push_back({kind, payload});
  }
  ch.cv.notify_one();
}

bool InProcTransport::try_recv(int src, MsgKind kind, std::vector<double>& out) {
  auto& ch = hub_->channel(src, rank_);
  std::lock_guard<std::mutex> lk(ch.mu);
  if (ch.q.empty()) return false;
  if (ch.q.front().kind != kind)
    throw ProtocolError(std::string("unexpected message kind ") +
                        to_string(ch.q.front().kind) + ", expected " + to_string(kind));
  out = std::move(ch.q.front().payload);
  ch.q.pop_front();
  record(src, rank_, out.size() * sizeof(double), kind, false);
  return true;
}

void InProcTransport::wait_for_data(int src) {
  auto& ch = hub_->channel(src, rank_);
  std::unique_lock<std::mutex> lk(ch.mu);
  ch.cv.wait(lk, [&] { return !ch.q.empty(); });
}

namespace {
constexpr std::uint32_t kFrameMagic = 0x53444721u;

struct FrameHeader {
  std::uint32_t kind;
  std::uint32_t magic;
  std::uint64_t count;
};

void write_all(int fd, const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("socket write failed: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}
}  // namespace

SocketTransport::SocketTransport(int rank, std::vector<int> peer_fds)
    : rank_(rank), fds_(std::move(peer_fds)), rx_(fds_.size()) {}

SocketTransport::~SocketTransport() {
  for (std::size_t r = 0; r < fds_.size(); ++r)
    if (static_cast<int>(r) != rank_ && fds_[r] >= 0) ::close(fds_[r]);
}

void SocketTransport::send(int dst, MsgKind kind, const std::vector<double>& payload) {
  record(rank_, dst, payload.size() * sizeof(double), kind, true);
  FrameHeader h{static_cast<std::uint32_t>(kind), kFrameMagic,
                static_cast<std::uint64_t>(payload.size())};
  // Messages are far smaller than the kernel socket buffers, so a plain
  // blocking write cannot stall against the peer.
  write_all(fds_[dst], &h, sizeof(h));
  if (!payload.empty()) write_all(fds_[dst], payload.data(), payload.size() * sizeof(double));
}

void SocketTransport::pump(int src) {
  RxState& rx = rx_[src];
  char tmp[65536];
  while (!rx.closed) {
    const ssize_t n = ::recv(fds_[src], tmp, sizeof(tmp), MSG_DONTWAIT);
    if (n > 0) {
      rx.buf.insert(rx.buf.end(), tmp, tmp + n);
      continue;
    }
    if (n == 0) {
      // Peer finished and closed; frames already buffered stay readable.
      rx.closed = true;
      break;
    }
    if (errno == EAGAIN || errno == EWOULDBLOCK) break;
    if (errno == EINTR) continue;
    throw ProtocolError(std::string("socket read failed: ") + std::strerror(errno));
  }
  // Decode complete frames.
  std::size_t off = 0;
  while (rx.buf.size() - off >= sizeof(FrameHeader)) {
    FrameHeader h;
    std::memcpy(&h, rx.buf.data() + off, sizeof(h));
    if (h.magic != kFrameMagic) throw ProtocolError("corrupt frame header");
    const std::size_t need = sizeof(FrameHeader) + h.count * sizeof(double);
    if (rx.buf.size() - off < need) break;
    InProcHub::Message msg;
    msg.kind = static_cast<MsgKind>(h.kind);
    msg.payload.resize(h.count);
    std::memcpy(msg.payload.data(), rx.buf.data() + off + sizeof(FrameHeader),
                h.count * sizeof(double));
    rx.q.push_back(std::move(msg));
    off += need;
  }
  if (off > 0) rx.buf.erase(rx.buf.begin(), rx.buf.begin() + off);
}

bool SocketTransport::try_recv(int src, MsgKind kind, std::vector<double>& out) {
  pump(src);
  RxState& rx = rx_[src];
  if (rx.q.empty()) {
    if (rx.closed) throw ProtocolError("peer closed connection with a receive pending");
    return false;
  }
  if (rx.q.front().kind != kind)
    throw ProtocolError(std::string("unexpected message kind ") +
                        to_string(rx.q.front().kind) + ", expected " + to_string(kind));
  out = std::move(rx.q.front().payload);
  rx.q.pop_front();
  record(src, rank_, out.size() * sizeof(double), kind, false);
  return true;
}

void SocketTransport::wait_for_data(int src) {
  struct pollfd pfd{fds_[src], POLLIN, 0};
  ::poll(&pfd, 1, 5);
}

}  // namespace sdg
