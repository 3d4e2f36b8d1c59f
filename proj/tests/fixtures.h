// Shared inputs for the test binaries.
#pragma once

#include <memory>
#include <string>

#include "nlidb/workspace.h"

namespace nlidb::fixture {

inline std::string SourcePath(const std::string &relative) {
  return std::string(NLIDB_SOURCE_DIR) + "/" + relative;
}

inline constexpr char kDirectorQuery[] =
    "Who is the director of the series House of Cards produced by Netflix?";

inline constexpr char kDirectorSql[] =
    "SELECT * FROM tv_series, copyright, company, directed_by, director "
    "WHERE (tv_series.msid = copyright.msid) AND (copyright.cid = company.cid) "
    "AND (tv_series.msid = directed_by.msid) AND (directed_by.did = director.did) "
    "AND (tv_series.title = \"House of Cards\") AND (company.name = \"Netflix\")";

// Gold tags of the director query, in corpus format.
inline constexpr char kDirectorBlock[] =
    "Who\tO\tO\n"
    "is\tO\tO\n"
    "the\tO\tO\n"
    "director\tTABLE\tdirector\n"
    "of\tO\tO\n"
    "the\tO\tO\n"
    "series\tTABLE\ttv_series\n"
    "House\tVALUE\ttv_series.title\n"
    "of\tVALUE\ttv_series.title\n"
    "Cards\tVALUE\ttv_series.title\n"
    "produced\tTABLEREF\tcopyright\n"
    "by\tO\tO\n"
    "Netflix\tVALUE\tcompany.name\n";

// The five-table television database and the larger movie database.
inline std::shared_ptr<const WorkspaceBundle> TvBundle() {
  static auto bundle = LoadBundle(SourcePath("data/workspace/tv"), "tv");
  return bundle;
}

inline std::shared_ptr<const WorkspaceBundle> MovieBundle() {
  static auto bundle = LoadBundle(SourcePath("data/workspace/movie"), "movie");
  return bundle;
}

}  // namespace nlidb::fixture
