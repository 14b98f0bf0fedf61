#ifndef PANOSWEEP_SUITE_HPP
#define PANOSWEEP_SUITE_HPP

// The fixed three-scene evaluation suite. Every scene is closed, so every
// pixel of a rendered view has a valid depth inside [0.2, 8] m.

#include "panosweep/scene.hpp"

#include <string>
#include <vector>

namespace panosweep {

/// Camera inside a checkered spherical shell of radius 3 m.
inline SceneSpec checker_sphere_scene()
{
    SceneSpec s;
    s.name = "checker-sphere";
    s.camera = {0.25, 0.1, -0.3};
    CheckerTexture tex;
    tex.scale = 0.3;
    tex.colors = {{0.1f, 0.1f, 0.12f}, {0.9f, 0.88f, 0.85f}, {0.75f, 0.3f, 0.2f},
                  {0.2f, 0.55f, 0.8f}, {0.95f, 0.8f, 0.2f}, {0.35f, 0.7f, 0.3f}, {0.55f, 0.45f, 0.6f}};
    s.primitives.push_back({Sphere{{0.0, 0.0, 0.0}, 3.0}, tex});
    return s;
}

/// Rectangular room with noise-textured walls, a box and a ball.
inline SceneSpec room_scene()
{
    SceneSpec s;
    s.name = "room";
    s.camera = {0.0, 0.0, 0.0};
    const auto wall = [](std::uint64_t seed) { return ValueNoiseTexture{seed, 0.3}; };
    s.primitives.push_back({Plane{{0.0, -1.5, 0.0}, {0.0, 1.0, 0.0}}, ValueNoiseTexture{10, 0.15}});
    s.primitives.push_back({Plane{{0.0, 2.0, 0.0}, {0.0, -1.0, 0.0}}, wall(11)});
    s.primitives.push_back({Plane{{-3.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, wall(12)});
    s.primitives.push_back({Plane{{3.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}, wall(13)});
    s.primitives.push_back({Plane{{0.0, 0.0, -3.5}, {0.0, 0.0, 1.0}}, wall(14)});
    s.primitives.push_back({Plane{{0.0, 0.0, 3.5}, {0.0, 0.0, -1.0}}, wall(15)});
    s.primitives.push_back({AxisAlignedBox{{0.8, -1.5, 1.2}, {1.7, -0.5, 2.1}}, ValueNoiseTexture{21, 0.15}});
    s.primitives.push_back({Sphere{{-1.3, 0.3, -1.6}, 0.5}, CheckerTexture{0.15, {{0.1f, 0.3f, 0.7f}, {0.95f, 0.9f, 0.3f}}}});
    return s;
}

/// Noise-textured ground under a canopy, scattered objects and a dome of radius 6 m.
inline SceneSpec courtyard_scene()
{
    SceneSpec s;
    s.name = "courtyard";
    s.camera = {0.0, 0.0, 0.0};
    s.primitives.push_back({Plane{{0.0, -1.2, 0.0}, {0.0, 1.0, 0.0}}, ValueNoiseTexture{30, 0.25}});
    s.primitives.push_back({Plane{{0.0, 2.6, 0.0}, {0.0, -1.0, 0.0}}, ValueNoiseTexture{35, 0.2}});
    s.primitives.push_back({Sphere{{0.0, 0.0, 0.0}, 6.0}, ValueNoiseTexture{31, 0.4}});
    s.primitives.push_back({AxisAlignedBox{{1.5, -1.2, -0.5}, {2.5, 0.6, 0.6}}, ValueNoiseTexture{32, 0.15}});
    s.primitives.push_back({AxisAlignedBox{{-3.0, -1.2, 2.0}, {-1.8, 0.0, 3.0}}, ValueNoiseTexture{33, 0.15}});
    s.primitives.push_back({Sphere{{-1.0, 0.2, -2.5}, 0.8}, CheckerTexture{0.2, {{0.8f, 0.2f, 0.2f}, {0.95f, 0.95f, 0.9f}}}});
    s.primitives.push_back({Sphere{{0.5, 1.8, 2.5}, 0.6}, ValueNoiseTexture{34, 0.12}});
    return s;
}

inline std::vector<SceneSpec> default_suite()
{
    return {checker_sphere_scene(), room_scene(), courtyard_scene()};
}

} // namespace panosweep

#endif // PANOSWEEP_SUITE_HPP
