#pragma once

#include "conceptx/completeness.hpp"
#include "conceptx/contamination.hpp"
#include "conceptx/dataset.hpp"
#include "conceptx/embedding_file.hpp"
#include "conceptx/error.hpp"
#include "conceptx/hoeffding.hpp"
#include "conceptx/measures.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/parallel.hpp"
#include "conceptx/prompt_editing.hpp"
#include "conceptx/report.hpp"
#include "conceptx/rng.hpp"
#include "conceptx/synthetic.hpp"
#include "conceptx/tcav.hpp"
#include "conceptx/theorem2.hpp"
#include "conceptx/verification.hpp"
#include "conceptx/votes.hpp"
