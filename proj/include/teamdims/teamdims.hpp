#pragma once

// Umbrella header. Individual headers are self-contained; include them
// directly when compile time matters.

#include "teamdims/adamw.hpp"
#include "teamdims/artifact.hpp"
#include "teamdims/baseline.hpp"
#include "teamdims/corpus.hpp"
#include "teamdims/corpus_io.hpp"
#include "teamdims/csv.hpp"
#include "teamdims/encoder.hpp"
#include "teamdims/error.hpp"
#include "teamdims/features.hpp"
#include "teamdims/fingerprint.hpp"
#include "teamdims/fs.hpp"
#include "teamdims/hash.hpp"
#include "teamdims/kappa.hpp"
#include "teamdims/label.hpp"
#include "teamdims/manifest.hpp"
#include "teamdims/metrics.hpp"
#include "teamdims/postag.hpp"
#include "teamdims/preprocess.hpp"
#include "teamdims/random_forest.hpp"
#include "teamdims/report.hpp"
#include "teamdims/rng.hpp"
#include "teamdims/schedule.hpp"
#include "teamdims/split.hpp"
#include "teamdims/synth.hpp"
#include "teamdims/text.hpp"
#include "teamdims/tfidf.hpp"
#include "teamdims/transformer.hpp"
#include "teamdims/version.hpp"
#include "teamdims/wordpiece.hpp"
