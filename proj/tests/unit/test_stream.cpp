#include <future>

#include "advsim/config.hpp"
#include "advsim/context.hpp"
#include "advsim/scenarios.hpp"
#include "advsim/stream.hpp"
#include "helpers.hpp"

using namespace advsim;
using namespace advsim::stream;
using namespace std::chrono_literals;

TEST(StreamCodec, CommandsRoundTrip) {
  const std::vector<RenderCommand> cmds{CircleCmd{1.5, -2, 3, {1, 2, 3}}, RectangleCmd{0, 0, 4, 5, {9, 9, 9}},
                                        LineCmd{0, 1, 2, 3, 0.5, {255, 0, 0}}, TextCmd{7, 8, "hé", 14, {0, 0, 1}}};
  for (const auto& c : cmds) EXPECT_EQ(command_from_json(command_to_json(c)), c);
  EXPECT_ERROR_KIND(command_from_json({{"kind", "hexagon"}}), InvalidArgument);
}

TEST(StreamCodec, PartialAndBatchedDecode) {
  const std::string a = encode(hello_message());
  const std::string b = encode(action_message("x", NodeId{3}));
  const std::string both = a + b;
  Decoder d;
  std::vector<nlohmann::json> got;
  for (char c : both) {
    d.feed(&c, 1);
    while (auto m = d.next()) got.push_back(*m);
  }
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0]["type"], "hello");
  EXPECT_EQ(got[0]["protocol_version"], kProtocolVersion);
  EXPECT_EQ(got[1]["target"], 3);

  Decoder bad;
  const std::string garbage = std::string("\x03\0\0\0", 4) + "{{{";
  bad.feed(garbage.data(), garbage.size());
  EXPECT_ERROR_KIND(bad.next(), InvalidArgument);
}

TEST(StreamCodec, InputEvents) {
  const auto action = to_input_event(action_message("a", NodeId{7}));
  ASSERT_TRUE(action);
  EXPECT_EQ(std::get<HumanAction>(*action).target, NodeId{7});
  const auto camera = to_input_event(camera_message({1, 2, 3, 4}));
  ASSERT_TRUE(camera);
  EXPECT_EQ(std::get<CameraEvent>(*camera).viewport, (Viewport{1, 2, 3, 4}));
  EXPECT_FALSE(to_input_event(hello_message()));
  EXPECT_EQ(parse_listen_address("0.0.0.0:9000"), (std::pair<std::string, std::uint16_t>{"0.0.0.0", 9000}));
  EXPECT_ERROR_KIND(parse_listen_address("nope"), ConfigError);
}

TEST(StreamServer, HelloAndFrames) {
  Server server("127.0.0.1", 0);
  Client client("127.0.0.1", server.port());
  client.send(hello_message());
  const auto hello = client.receive_type("hello", 2s);
  ASSERT_TRUE(hello);
  EXPECT_EQ((*hello)["protocol_version"], kProtocolVersion);
  ASSERT_TRUE(server.wait_for_clients(1, 2s));
  Frame f;
  f.turn = 4;
  f.commands.push_back(CircleCmd{1, 1, 1, {}});
  server.broadcast(frame_message(f), true);
  const auto frame = client.receive_type("frame", 2s);
  ASSERT_TRUE(frame);
  EXPECT_EQ((*frame)["turn"], 4);
  EXPECT_EQ(command_from_json((*frame)["commands"][0]), f.commands[0]);
  client.send(camera_message({5, 5, 1, 1}));
  const auto inbound = server.wait_message(2s);
  ASSERT_TRUE(inbound);
  EXPECT_EQ((*inbound)["type"], "camera");
}

TEST(StreamServer, ProtocolMismatchDisconnects) {
  Server server("127.0.0.1", 0);
  Client client("127.0.0.1", server.port());
  client.send({{"type", "hello"}, {"protocol_version", 99}});
  for (int i = 0; i < 40 && !client.closed(); ++i) client.receive(50ms);
  EXPECT_TRUE(client.closed());
}

TEST(StreamServer, LaggingClientDropsFramesOnly) {
  Server server("127.0.0.1", 0, 2);
  Client client("127.0.0.1", server.port());
  ASSERT_TRUE(server.wait_for_clients(1, 2s));
  Frame f;
  f.commands.assign(20000, LineCmd{0, 0, 1, 1, 1, {}});  // large enough to back up the socket
  for (int i = 0; i < 200; ++i) {
    f.turn = static_cast<std::uint64_t>(i);
    server.broadcast(frame_message(f), true);
  }
  server.broadcast(action_request_message("x", std::vector<NodeId>{NodeId{1}}), false);
  EXPECT_GT(server.dropped_frames(), 0u);
  EXPECT_TRUE(client.receive_type("action_request", 10s));
}

TEST(StreamBackend, RequestReprompsOnIllegalAnswer) {
  StreamBackend backend(std::make_unique<Server>("127.0.0.1", 0));
  const std::uint16_t port = backend.server().port();
  auto answer = std::async(std::launch::async, [port] {
    Client client("127.0.0.1", port);
    client.send(hello_message());
    auto first = client.receive_type("action_request", 5s);
    if (!first) return 0;
    client.send(action_message("h", NodeId{42}));
    auto second = client.receive_type("action_request", 5s);
    if (!second) return 1;
    client.send(action_message("h", NodeId{(*second)["targets"][0].get<std::uint64_t>()}));
    return 2;
  });
  const std::vector<NodeId> targets{NodeId{3}, NodeId{4}};
  EXPECT_EQ(backend.request_action("h", targets, 5000ms), NodeId{3});
  EXPECT_EQ(answer.get(), 2);
}

TEST(StreamBackend, NoClientAndTimeout) {
  StreamBackend backend(std::make_unique<Server>("127.0.0.1", 0));
  const std::vector<NodeId> targets{NodeId{1}};
  EXPECT_ERROR_KIND(backend.request_action("h", targets, 200ms), NoClientConnected);
  Client silent("127.0.0.1", backend.server().port());
  ASSERT_TRUE(backend.server().wait_for_clients(1, 2s));
  EXPECT_ERROR_KIND(backend.request_action("h", targets, 200ms), Timeout);
}

TEST(StreamBackend, HumanAgentDrivenByScriptedClient) {
  Context ctx({.vis = VisMode::Stream, .human_timeout = 5000ms});
  create_grid(ctx.graph(), 3);
  ctx.create_agent("h", GroundKind{}, NodeId{0});
  ctx.visual().set_graph_visual(ctx, 100, 100);
  ctx.visual().set_agent_visual(ctx, "h", {255, 0, 0}, 3);
  auto backend = std::make_unique<StreamBackend>(std::make_unique<Server>("127.0.0.1", 0));
  const std::uint16_t port = backend->server().port();
  ctx.visual().set_backend(std::move(backend));

  auto script = std::async(std::launch::async, [port] {
    Client client("127.0.0.1", port);
    client.send(hello_message());
    const std::vector<std::uint64_t> path{1, 2, 5};
    std::size_t frames = 0;
    for (std::uint64_t next : path) {
      if (!client.receive_type("action_request", 5s)) break;
      client.send(action_message("h", NodeId{next}));
    }
    while (client.receive_type("frame", 1s)) ++frames;
    return std::pair(client.sent_types(), frames);
  });
  for (int i = 0; i < 3; ++i) ctx.step();
  EXPECT_EQ(ctx.agents().get("h").current_node(), NodeId{5});
  const auto [sent, frames] = script.get();
  EXPECT_GE(frames, 1u);
  for (const std::string& type : sent) EXPECT_TRUE(type == "hello" || type == "action" || type == "camera") << type;
}
