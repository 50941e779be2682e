#include <array>
#include <stdexcept>

#include "fvproj/mesh.hpp"

namespace fvproj {

namespace {

// Acute triangulation of the unit square (40 triangles, largest angle about
// 75.6 degrees). Corners connect to an interior vertex and every boundary
// vertex off a corner has two interior neighbours, which is what allows all
// angles to stay below pi/2 along the sides. Coordinates are rounded to 1e-4.
constexpr std::array<Vec2, 27> kSeedVertices{{
    {0.0000, 0.0000}, {0.3693, 0.0000}, {0.6307, 0.0000}, {1.0000, 0.0000},
    {1.0000, 0.3748}, {1.0000, 0.5961}, {1.0000, 1.0000}, {0.5964, 1.0000},
    {0.4036, 1.0000}, {0.0000, 1.0000}, {0.0000, 0.5961}, {0.0000, 0.3748},
    {0.1980, 0.3118}, {0.6761, 0.1774}, {0.3537, 0.8056}, {0.3239, 0.1774},
    {0.4999, 0.1725}, {0.7923, 0.5037}, {0.5000, 0.8472}, {0.2077, 0.5037},
    {0.8020, 0.3118}, {0.7866, 0.6572}, {0.6463, 0.8056}, {0.2134, 0.6572},
    {0.4387, 0.3629}, {0.5613, 0.3629}, {0.5000, 0.5695},
}};

constexpr std::array<std::array<int, 3>, 40> kSeedTriangles{{
    {13, 2, 3},   {2, 13, 16},  {21, 5, 6},   {1, 2, 16},   {13, 25, 16}, {8, 18, 7},
    {20, 13, 3},  {20, 25, 13}, {12, 11, 0},  {25, 24, 16}, {24, 25, 26}, {18, 22, 7},
    {7, 22, 6},   {22, 21, 6},  {21, 22, 26}, {22, 18, 26}, {10, 23, 9},  {4, 20, 3},
    {20, 17, 25}, {17, 21, 26}, {25, 17, 26}, {21, 17, 5},  {17, 4, 5},   {4, 17, 20},
    {24, 15, 16}, {15, 24, 12}, {15, 1, 16},  {1, 15, 0},   {15, 12, 0},  {14, 18, 8},
    {14, 8, 9},   {23, 14, 9},  {18, 14, 26}, {14, 23, 26}, {19, 24, 26}, {23, 19, 26},
    {24, 19, 12}, {19, 23, 10}, {11, 19, 10}, {19, 11, 12},
}};

}  // namespace

Mesh acute_square_mesh(int level) {
  if (level < 0) {
    throw std::invalid_argument("mesh level must be non-negative");
  }
  Mesh mesh = Mesh::from_arrays({kSeedVertices.begin(), kSeedVertices.end()},
                                {kSeedTriangles.begin(), kSeedTriangles.end()});
  // The seed itself is pre-asymptotic for the inf-sup constant; level 0 is its
  // first refinement.
  for (int l = 0; l <= level; ++l) {
    mesh = refine_uniform(mesh);
  }
  return mesh;
}

}  // namespace fvproj
