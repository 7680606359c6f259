#pragma once

#include "stegscan/analytics.hpp"
#include "stegscan/bytes.hpp"
#include "stegscan/carriers.hpp"
#include "stegscan/corpus.hpp"
#include "stegscan/crafter.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/eicar.hpp"
#include "stegscan/format_parser.hpp"
#include "stegscan/io.hpp"
#include "stegscan/report_io.hpp"
#include "stegscan/scanner.hpp"
#include "stegscan/signatures.hpp"
#include "stegscan/transform.hpp"
