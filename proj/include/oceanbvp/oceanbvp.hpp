#pragma once

#include "oceanbvp/block_newton.hpp"
#include "oceanbvp/errors.hpp"
#include "oceanbvp/free_boundary.hpp"
#include "oceanbvp/ivp.hpp"
#include "oceanbvp/mesh_solution.hpp"
#include "oceanbvp/model.hpp"
#include "oceanbvp/quasi_uniform.hpp"
#include "oceanbvp/shooting.hpp"
