#pragma once

#include <string>
#include <string_view>

#include "nlidb/explain.h"
#include "nlidb/mappers.h"
#include "nlidb/translate.h"

namespace nlidb {

// Per-database settings read from a key = value file. "[section]" headers
// prefix the keys that follow with "section.". Recognized keys:
//
//   lexical_threshold, embedding_threshold, context_boost, prev_window,
//   cond_operators, stopwords, cond_lexicon,
//   lexicon.count, lexicon.sum, lexicon.avg,
//   lime.samples, lime.seed, lime.kernel_width, lime.ridge, lime.mode,
//   synonym.<word> = TYPE:schema_tag
//
// Lists are comma-separated. Missing keys keep their defaults.
struct ServiceConfig {
  TaggerConfig tagger;
  TranslateOptions translate;
  LimeConfig lime;
};

// Throws nlidb::ParseError (stage "load_config") on unknown keys or bad values.
ServiceConfig ParseConfig(std::string_view text);

}  // namespace nlidb
