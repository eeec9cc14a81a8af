#pragma once

// Umbrella header.

#include "natlog/error.hpp"
#include "natlog/relation.hpp"
#include "natlog/set_model.hpp"
#include "natlog/text.hpp"
#include "natlog/annotation.hpp"
#include "natlog/lexical_kb.hpp"
#include "natlog/tagger.hpp"
#include "natlog/adapters.hpp"
#include "natlog/generation.hpp"
#include "natlog/quality.hpp"
#include "natlog/attack.hpp"
#include "natlog/harness.hpp"
