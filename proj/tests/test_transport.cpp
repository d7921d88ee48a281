#include <doctest.h>

#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "errors.hpp"
#include "transport.hpp"

using namespace sdg;

TEST_SUITE("transport") {

TEST_CASE("in-process channels deliver in order") {
  InProcHub hub(2);
  InProcTransport t0(hub, 0), t1(hub, 1);

  t0.send(1, MsgKind::SolutionConf, {1.0, 2.0});
  t0.send(1, MsgKind::SolutionMortar, {3.0});

  std::vector<double> out;
  CHECK(t1.try_recv(0, MsgKind::SolutionConf, out));
  CHECK(out == std::vector<double>{1.0, 2.0});
  CHECK(t1.try_recv(0, MsgKind::SolutionMortar, out));
  CHECK(out == std::vector<double>{3.0});
  CHECK_FALSE(t1.try_recv(0, MsgKind::SolutionConf, out));  // drained
}

TEST_CASE("in-process FIFO head must match the expected kind") {
  InProcHub hub(2);
  InProcTransport t0(hub, 0), t1(hub, 1);
  t0.send(1, MsgKind::SolutionConf, {1.0});
  std::vector<double> out;
  CHECK_THROWS_AS(t1.try_recv(0, MsgKind::FluxConf, out), ProtocolError);
  CHECK(t1.try_recv(0, MsgKind::SolutionConf, out));
  CHECK(out == std::vector<double>{1.0});
}

TEST_CASE("in-process blocking receive across threads") {
  InProcHub hub(2);
  std::vector<double> got;
  std::thread consumer([&] {
    InProcTransport t1(hub, 1);
    got = t1.recv(0, MsgKind::FluxMortar);
  });
  std::thread producer([&] {
    InProcTransport t0(hub, 0);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    t0.send(1, MsgKind::FluxMortar, {4.0, 5.0, 6.0});
  });
  producer.join();
  consumer.join();
  CHECK(got == std::vector<double>{4.0, 5.0, 6.0});
}

TEST_CASE("allgather distributes every contribution") {
  InProcHub hub(3);
  std::array<std::vector<std::vector<double>>, 3> results;
  std::vector<std::thread> workers;
  for (int r = 0; r < 3; ++r)
    workers.emplace_back([&, r] {
      InProcTransport t(hub, r);
      results[r] = t.allgather({static_cast<double>(r), 10.0 + r});
    });
  for (auto& w : workers) w.join();
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) {
      REQUIRE(results[r][s].size() == 2);
      CHECK(results[r][s][0] == s);
      CHECK(results[r][s][1] == 10.0 + s);
    }
}

TEST_CASE("socket transport round trip with framing") {
  int sp[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, sp) == 0);

  std::vector<double> big(5000);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = 0.5 * i;

  std::thread peer([&] {
    SocketTransport t1(1, {sp[1], -1});
    const auto a = t1.recv(0, MsgKind::SolutionMortar);
    t1.send(0, MsgKind::FluxMortar, a);
  });

  SocketTransport t0(0, {-1, sp[0]});
  t0.send(1, MsgKind::SolutionMortar, big);
  const auto back = t0.recv(1, MsgKind::FluxMortar);
  peer.join();
  CHECK(back == big);
}

TEST_CASE("traces record sends and receives with payload bytes") {
  InProcHub hub(2);
  InProcTransport t0(hub, 0), t1(hub, 1);
  t0.set_context(3, 2);
  t0.send(1, MsgKind::GradMortar, {1.0, 2.0, 3.0});
  t1.set_context(3, 2);
  (void)t1.recv(0, MsgKind::GradMortar);

  REQUIRE(t0.trace().size() == 1);
  CHECK(t0.trace()[0].is_send);
  CHECK(t0.trace()[0].bytes == 24);
  CHECK(t0.trace()[0].step == 3);
  CHECK(t0.trace()[0].stage == 2);
  REQUIRE(t1.trace().size() == 1);
  CHECK_FALSE(t1.trace()[0].is_send);
  CHECK(t1.trace()[0].bytes == 24);
}

}  // TEST_SUITE
