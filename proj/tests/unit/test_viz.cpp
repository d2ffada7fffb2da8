#include "advsim/config.hpp"
#include "advsim/context.hpp"
#include "advsim/scenarios.hpp"
#include "helpers.hpp"

using namespace advsim;

namespace {

Artist drawing(int layer, std::vector<std::string>* log, std::string tag) {
  Artist a;
  a.layer = layer;
  a.drawer = [log, tag](Context& ctx, const nlohmann::json&) {
    log->push_back(tag);
    ctx.visual().render_circle(0, 0, 1, {});
  };
  return a;
}

}  // namespace

TEST(Viz, LayersThenInsertionOrder) {
  Context ctx({.vis = VisMode::Stream});
  std::vector<std::string> log;
  ctx.visual().add_artist("top", drawing(30, &log, "top"));
  ctx.visual().add_artist("bottom", drawing(10, &log, "bottom"));
  ctx.visual().add_artist("top2", drawing(30, &log, "top2"));
  const Frame f = ctx.visual().render_frame(ctx, std::nullopt);
  EXPECT_EQ(log, (std::vector<std::string>{"bottom", "top", "top2"}));
  EXPECT_EQ(f.commands.size(), 3u);
}

TEST(Viz, Errors) {
  Context ctx;
  EXPECT_ERROR_KIND(ctx.visual().render_circle(0, 0, 1, {}), PrimitiveOutsideFrame);
  std::vector<std::string> log;
  ctx.visual().add_artist("a", drawing(0, &log, "a"));
  EXPECT_ERROR_KIND(ctx.visual().add_artist("a", drawing(0, &log, "a")), DuplicateArtist);
  EXPECT_ERROR_KIND(ctx.visual().set_agent_visual(ctx, "ghost", {}, 1), UnknownAgent);
  ctx.visual().remove_artist("a");
  EXPECT_FALSE(ctx.visual().has_artist("a"));
}

TEST(Viz, CullKeepsStraddlingDropsOutside) {
  const Viewport vp{0, 0, 10, 10};
  const std::vector<RenderCommand> cmds{CircleCmd{50, 50, 1, {}}, CircleCmd{11, 0, 2, {}},
                                        LineCmd{-20, 0, 20, 0, 1, {}}, RectangleCmd{0, 30, 4, 4, {}},
                                        TextCmd{0, 0, "hi", 12, {}}};
  const auto kept = cull(cmds, vp);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0], cmds[1]);
  EXPECT_EQ(kept[1], cmds[2]);
  EXPECT_EQ(kept[2], cmds[4]);
}

TEST(Viz, WholeWorldViewportKeepsEverything) {
  auto ctx = create_context(parse_config({{"preset", "grid_tag"}, {"vis", {{"mode", "stream"}}}}));
  const Frame all = ctx->visual().render_frame(*ctx, std::nullopt);
  const Frame culled = ctx->visual().render_frame(*ctx, Viewport{190, 190, 400, 400});
  EXPECT_EQ(all.commands, culled.commands);
  EXPECT_GT(all.commands.size(), 400u);
}

TEST(Viz, HeadlessNeverDraws) {
  auto ctx = create_context(parse_config({{"preset", "grid_tag"}}));
  while (!ctx->is_terminated()) ctx->step();
  EXPECT_EQ(ctx->visual().drawer_calls(), 0u);
  EXPECT_EQ(ctx->visual().frames_presented(), 0u);
}

TEST(Viz, StreamModeWithoutBackendRendersEachTurn) {
  auto ctx = create_context(parse_config({{"preset", "grid_tag"}, {"vis", {{"mode", "stream"}}}}));
  for (int i = 0; i < 3; ++i) ctx->step();
  EXPECT_EQ(ctx->visual().frames_presented(), 3u);
  EXPECT_GT(ctx->visual().drawer_calls(), 0u);
}

TEST(Viz, CameraAndPauseInput) {
  Context ctx;
  ctx.visual().push_input(CameraEvent{{1, 2, 3, 4}});
  EXPECT_EQ(ctx.visual().viewport(), (Viewport{1, 2, 3, 4}));
  ctx.visual().push_input(PauseEvent{});
  EXPECT_TRUE(ctx.visual().paused());
  ctx.visual().push_input(ResumeEvent{});
  EXPECT_FALSE(ctx.visual().paused());
}

TEST(Viz, QueuedHumanActionIsUsed) {
  Context ctx({.vis = VisMode::Stream});
  create_grid(ctx.graph(), 3);
  ctx.create_agent("h", GroundKind{}, NodeId{4});
  ctx.visual().push_input(HumanAction{"h", NodeId{8}});  // illegal, skipped
  ctx.visual().push_input(HumanAction{"h", NodeId{5}});
  ctx.step();
  EXPECT_EQ(ctx.agents().get("h").current_node(), NodeId{5});
}
