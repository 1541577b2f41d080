#pragma once

#include "hdyn/errors.hpp"
#include "hdyn/numeric.hpp"
#include "hdyn/partition.hpp"
#include "hdyn/tree.hpp"
#include "hdyn/echelon.hpp"
#include "hdyn/homology.hpp"
#include "hdyn/filtration.hpp"
#include "hdyn/hassett.hpp"
#include "hdyn/permutation.hpp"
#include "hdyn/hurwitz.hpp"
#include "hdyn/pushforward.hpp"
#include "hdyn/spectral.hpp"
#include "hdyn/json_io.hpp"
#include "hdyn/acceptance.hpp"
