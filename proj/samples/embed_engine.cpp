// Drives the engine directly with a scripted gaze stream: look at a panel,
// press the trigger, keep reading until the magnifier opens, then dwell on
// the lower scroll strip.

#include <cmath>
#include <iostream>

#include "vrdoc/harness.hpp"
#include "vrdoc/json_io.hpp"

int main() {
  using namespace vrdoc;
  const Scenario scenario = build_task_scenario(Task::T3, 1);
  Engine engine(build_scene(scenario), scenario.config);
  PipelineState pipe;
  const double dt = 1.0 / scenario.config.sample_rate_hz;
  const Pose head = scenario.head_start;

  long long index = 0;
  auto look = [&](Uv uv, double seconds, bool trigger = false) {
    for (long long n = std::llround(seconds / dt); n > 0; --n, ++index) {
      const auto& p = engine.scene().panels[0];
      GazeSample s;
      s.t = static_cast<double>(index) * dt;
      s.ray = Ray::through(head.position, panel_point(p.pose, p.extent, uv));
      s.head_orientation = head.orientation;
      s.buttons.trigger_pressed = trigger;
      const auto& est = step_pipeline(pipe, s, scenario.config.pipeline());
      for (const auto& e : engine.step(est, head_pose(s), s.buttons, s.t)) std::cout << io::event_line(e) << '\n';
    }
  };

  look({0.5, 0.5}, 0.3);
  look({0.5, 0.5}, 0.05, true);  // snap to reading distance
  look({0.3, 0.4}, 1.6);         // magnifier opens after 1.5 s
  const double strip = scenario.config.scroll_button_strip_frac;
  look({0.5, 1.0 - strip / 2}, 1.0 + dt);  // two sentences down
  look({0.5, 0.5}, 0.2);
  return 0;
}
