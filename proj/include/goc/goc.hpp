#ifndef GOC_GOC_HPP_
#define GOC_GOC_HPP_

#include "goc/boundary.hpp"
#include "goc/config.hpp"
#include "goc/contour_oracle.hpp"
#include "goc/errors.hpp"
#include "goc/evolve.hpp"
#include "goc/forces.hpp"
#include "goc/geometry.hpp"
#include "goc/image.hpp"
#include "goc/interaction.hpp"
#include "goc/levelset.hpp"
#include "goc/likelihood.hpp"
#include "goc/stability.hpp"
#include "goc/synthbench.hpp"
#include "goc/version.hpp"

#endif  // GOC_GOC_HPP_
