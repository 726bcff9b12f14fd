#pragma once

#include "entangle/bell.hpp"
#include "entangle/classify.hpp"
#include "entangle/hilbert_mumford.hpp"
#include "entangle/io.hpp"
#include "entangle/kempf_ness.hpp"
#include "entangle/random.hpp"
#include "entangle/repr_core.hpp"
#include "entangle/spin_states.hpp"
#include "entangle/system.hpp"
#include "entangle/tensor_invariants.hpp"
