/// @file crashnet.hpp
/// @brief Umbrella header.

#pragma once
#include "crashnet/encoding.hpp"
#include "crashnet/equilibrium.hpp"
#include "crashnet/error.hpp"
#include "crashnet/hubo.hpp"
#include "crashnet/legendre.hpp"
#include "crashnet/linalg.hpp"
#include "crashnet/network.hpp"
#include "crashnet/network_io.hpp"
#include "crashnet/pipeline.hpp"
#include "crashnet/polynomial.hpp"
#include "crashnet/qubo.hpp"
#include "crashnet/reduction.hpp"
#include "crashnet/rng.hpp"
#include "crashnet/solver/decompose.hpp"
#include "crashnet/solver/flip_model.hpp"
#include "crashnet/solver/local.hpp"
#include "crashnet/solver/majority.hpp"
#include "crashnet/solver/qubo_io.hpp"
#include "crashnet/solver/remote.hpp"
#include "crashnet/solver/sample_set.hpp"
