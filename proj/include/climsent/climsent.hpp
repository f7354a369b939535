#pragma once

// Everything in one include.
#include "climsent/corpus.hpp"
#include "climsent/csv.hpp"
#include "climsent/error.hpp"
#include "climsent/eval.hpp"
#include "climsent/experiment.hpp"
#include "climsent/external.hpp"
#include "climsent/features.hpp"
#include "climsent/forest.hpp"
#include "climsent/linear.hpp"
#include "climsent/model.hpp"
#include "climsent/porter.hpp"
#include "climsent/preprocess.hpp"
#include "climsent/random.hpp"
#include "climsent/stopwords.hpp"
#include "climsent/synthetic.hpp"
#include "climsent/tree.hpp"
#include "climsent/word2vec.hpp"
