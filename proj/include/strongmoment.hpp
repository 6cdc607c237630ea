#pragma once

#include "strongmoment/error.hpp"
#include "strongmoment/linalg.hpp"
#include "strongmoment/moments.hpp"
#include "strongmoment/gns.hpp"
#include "strongmoment/extensions.hpp"
#include "strongmoment/solutions.hpp"
#include "strongmoment/io.hpp"
#include "strongmoment/cli.hpp"
