#ifndef RWRE_PRESETS_HPP
#define RWRE_PRESETS_HPP

#include <string>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

// Named example laws used throughout the test batteries.
//   lazy-nn               1d, pi_01 in {1/2, 1} equally (holding otherwise)
//   one-two-jump          1d, pi_01 + pi_02 = 1 with q_0 = pi_02 in {0.2, 0.6}
//   abscont               2d three-atom law with the null invariant-measure event
//   si-infty              2d countable mixture with E_0(sigma_1) = infinity
//   two-jump-homogeneous  2d homogeneous walk choosing (1,0) or (0,1)
//   const-drift           1d two-atom mixture with D identically 1/2
//   deterministic         1d unit drift, single atom
EnvironmentLaw preset_law(const std::string& name);

std::vector<std::string> preset_names();

// The S_{-1}-measurable event A of the abscont example: three fixed atoms one
// column behind the base point; P(A) = 1/27 but the environment chain never
// sees it.
WindowEvent abscont_event();

} // namespace rwre

#endif
