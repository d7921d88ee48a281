#include "audit.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace sdg {

namespace {

int payload_vars(MsgKind k) {
  switch (k) {
    case MsgKind::SolutionConf:
    case MsgKind::SolutionMortar:
    case MsgKind::FluxConf:
    case MsgKind::FluxMortar:
      return kNumVars;
    case MsgKind::LiftConf:
    case MsgKind::LiftMortar:
      return 3;
    case MsgKind::GradConf:
    case MsgKind::GradMortar:
      return 6;
    default:
      return 0;
  }
}

bool is_mortar_kind(MsgKind k) {
  return k == MsgKind::SolutionMortar || k == MsgKind::FluxMortar ||
         k == MsgKind::LiftMortar || k == MsgKind::GradMortar;
}

bool moving_to_static(MsgKind k) {
  return k == MsgKind::SolutionMortar || k == MsgKind::GradMortar;
}

}  // namespace

AuditReport audit_communication(const std::vector<TraceRow>& trace, const Mesh& mesh,
                                const Ownership& own, int n1) {
  AuditReport report;

  // Rank sets adjacent to each interface side, derived from the ownership.
  std::vector<std::set<int>> static_ranks(mesh.interfaces().size());
  std::vector<std::set<int>> moving_ranks(mesh.interfaces().size());
  for (const auto& iface : mesh.interfaces()) {
    const int sb = iface.static_band();
    const int mb = iface.moving_band();
    const Band& stat = mesh.band(sb);
    const Band& mov = mesh.band(mb);
    const int stat_col = iface.static_is_left ? stat.nx - 1 : 0;
    const int mov_col = iface.static_is_left ? 0 : mov.nx - 1;
    for (int iy = 0; iy < stat.ny; ++iy)
      static_ranks[iface.id].insert(own.owner(sb, stat_col * stat.ny + iy));
    for (int iy = 0; iy < mov.ny; ++iy)
      moving_ranks[iface.id].insert(own.owner(mb, mov_col * mov.ny + iy));
  }

  std::map<int, int> init_sends_per_pair;  // (src * R + dst) -> count

  // Sends and receives must pair up one to one per channel and kind. The
  // merged trace is only ordered within each rank, so the two sequences are
  // collected first and zipped afterwards; each sequence originates from a
  // single rank and is therefore in true channel order.
  std::map<std::tuple<int, int, int>, std::deque<std::uint64_t>> sent, received;

  for (const auto& row : trace) {
    if (row.kind == MsgKind::InitRankMaps) {
      if (row.step >= 0) {
        report.post_init_collectives++;
        report.fail("collective message after init at step " + std::to_string(row.step));
      } else if (row.is_send) {
        report.init_collective_sends++;
        const int key = row.src * 65536 + row.dst;
        if (++init_sends_per_pair[key] > 1)
          report.fail("rank map exchanged more than once between ranks " +
                      std::to_string(row.src) + " and " + std::to_string(row.dst));
      }
      continue;
    }
    if (row.step < 0) {
      report.fail(std::string("data message of kind ") + to_string(row.kind) +
                  " during init");
      continue;
    }

    const int vars = payload_vars(row.kind);
    if (vars == 0) {
      report.fail(std::string("unexpected message kind ") + to_string(row.kind) +
                  " in the simulation phase");
      continue;
    }
    const std::uint64_t item = static_cast<std::uint64_t>(n1) * vars * sizeof(double);
    if (row.bytes == 0 || row.bytes % item != 0)
      report.fail("payload of " + std::to_string(row.bytes) +
                  " bytes is not a whole number of " + to_string(row.kind) + " lines");

    if (is_mortar_kind(row.kind)) {
      bool legal = false;
      for (std::size_t ic = 0; ic < mesh.interfaces().size(); ++ic) {
        const auto& from = moving_to_static(row.kind) ? moving_ranks[ic] : static_ranks[ic];
        const auto& to = moving_to_static(row.kind) ? static_ranks[ic] : moving_ranks[ic];
        if (from.count(row.src) && to.count(row.dst)) legal = true;
      }
      if (!legal)
        report.fail(std::string("mortar message ") + to_string(row.kind) + " between ranks " +
                    std::to_string(row.src) + "->" + std::to_string(row.dst) +
                    " not sanctioned by the rank maps");
    }

    const auto key = std::make_tuple(row.src, row.dst, static_cast<int>(row.kind));
    if (row.is_send) {
      report.data_messages++;
      report.data_bytes += row.bytes;
      sent[key].push_back(row.bytes);
    } else {
      received[key].push_back(row.bytes);
    }
  }

  for (const auto& [key, sq] : sent) {
    const auto it = received.find(key);
    const std::size_t nr = it == received.end() ? 0 : it->second.size();
    if (sq.size() != nr) {
      report.fail("send/receive count mismatch on channel " +
                  std::to_string(std::get<0>(key)) + "->" + std::to_string(std::get<1>(key)));
      continue;
    }
    for (std::size_t i = 0; i < sq.size(); ++i)
      if (sq[i] != it->second[i]) {
        report.fail("send/receive byte mismatch on channel " +
                    std::to_string(std::get<0>(key)) + "->" +
                    std::to_string(std::get<1>(key)));
        break;
      }
  }
  for (const auto& [key, rq] : received)
    if (sent.find(key) == sent.end())
      report.fail("receive without a matching send on channel " +
                  std::to_string(std::get<0>(key)) + "->" + std::to_string(std::get<1>(key)));

  return report;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open trace file " + path);
  os << "step,stage,src,dst,bytes,kind,direction\n";
  for (const auto& row : trace)
    os << row.step << ',' << row.stage << ',' << row.src << ',' << row.dst << ','
       << row.bytes << ',' << to_string(row.kind) << ',' << (row.is_send ? "send" : "recv")
       << '\n';
}

}  // namespace sdg
