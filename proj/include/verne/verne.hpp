#pragma once

// Kinematics library for a hybrid 5-axis architecture: a 3-DOF translational
// parallel module whose asymmetric leg couples platform roll to position,
// mounted over a 2-DOF tilting table.

#include "coupling.hpp"
#include "fk.hpp"
#include "ik.hpp"
#include "legs.hpp"
#include "oracle.hpp"
#include "params.hpp"
#include "polyroots.hpp"
#include "transforms.hpp"
#include "workspace.hpp"
