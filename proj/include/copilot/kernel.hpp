#pragma once

#include "copilot/kernel/apply.hpp"
#include "copilot/kernel/formula.hpp"
#include "copilot/kernel/g4ip.hpp"
#include "copilot/kernel/sequent.hpp"
#include "copilot/kernel/tactic.hpp"
