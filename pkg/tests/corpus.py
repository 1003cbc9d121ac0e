"""Hand-labeled method corpus plus an independently written rule-table oracle.

Each entry is (declaration text, expected kind).  The labels were assigned by
hand from the support rules; oracle_classify() re-derives them with brute
string checks over canonical parameter spellings, sharing no code with the
classifier under test.  Tests assert classifier == oracle == hand label.
"""

DIRECT = "Direct"
CALLBACK = "Callback"
UNSUPPORTED = "Unsupported"

CORPUS = [
    ("void clear();", DIRECT),
    ("double length() const;", DIRECT),
    ("unsigned int getDimension() const;", DIRECT),
    ("void setLow(double low);", DIRECT),
    ("int uniformInt(int lower_bound, int upper_bound);", DIRECT),
    ("bool isValid(const State *state) const;", DIRECT),
    ("void freeState(State *state) const;", DIRECT),
    ("const std::string &getName() const;", DIRECT),
    ("void setName(const std::string &name);", DIRECT),
    ("std::size_t getStateCount() const;", DIRECT),
    ("void setBounds(const RealVectorBounds &bounds);", DIRECT),
    ("void setBounds(double low, double high);", DIRECT),
    ("static void setSeed(std::uint_fast32_t seed);", DIRECT),
    ("std::uint_fast32_t getLocalSeed() const;", DIRECT),
    ("void interpolate(unsigned int count);", DIRECT),
    ("void reverse();", DIRECT),
    ("State *allocState() const;", DIRECT),
    # Mutable ref to a plain bound class stays inside the subset; only
    # composite (templated) referents are rejected.
    ("void getPlannerData(PlannerData &data) const;", DIRECT),
    ("void setMaxNearestNeighbors(unsigned int k);", DIRECT),
    ("double distance(const State *s1, const State *s2) const;", DIRECT),
    ("void setRange(double distance);", DIRECT),
    ("Control *allocControl() const;", DIRECT),
    ("void copyState(State *destination, const State *source) const;", DIRECT),
    ("const SpaceInformationPtr &getSpaceInformation() const;", DIRECT),
    ("void setStateSpace(StateSpacePtr space);", DIRECT),
    ("void setProblemDefinition(const ProblemDefinitionPtr &pdef);", DIRECT),
    ("void addDimension(double minBound = 0.0, double maxBound = 0.0);", DIRECT),
    # Stream parameters classify Direct; the emitter wraps them.
    ("void printState(const State *state, std::ostream &out = std::cout) const;", DIRECT),
    ("void printSettings(std::ostream &out) const;", DIRECT),
    ("double &element(unsigned int index);", DIRECT),
    # Mutable ref to a builtin: inner is empty, so it stays Direct.
    ("void update(double &value);", DIRECT),
    ("bool satisfiesBounds(const State *state) const;", DIRECT),
    ("void enforceBounds(State *state) const;", DIRECT),
    ("void setup();", DIRECT),
    ("std::vector<double> getBounds() const;", DIRECT),
    # Const ref to a composite is read-only and therefore fine.
    ("void setWeights(const std::vector<double> &weights);", DIRECT),
    ("void setStateValidityChecker(const std::function<bool(const State *)> &svc);", CALLBACK),
    ("void setEdgeWeightFn(std::function<double(const State *, const State *)> fn);", CALLBACK),
    ("void onSolutionFound(const std::function<void()> &callback);", CALLBACK),
    (
        "void setPropagator(const std::function<void(const State *, Control *, double, State *)> &fn);",
        CALLBACK,
    ),
    ("void setDistanceFunction(std::function<double(const State *, const State *)> distFun);", CALLBACK),
    # Unsupported wins over Callback when both kinds of parameter appear.
    ("void configure(std::function<void()> cb, std::pair<double, double> &range);", UNSUPPORTED),
    (
        "bool checkMotion(const State *s1, const State *s2, std::pair< State *, double > &lastValid) const;",
        UNSUPPORTED,
    ),
    ("void getSolutions(std::vector<PathGeometric> &solutions) const;", UNSUPPORTED),
    ("void steer(const State *from, State *to, std::map<std::string, double> &params);", UNSUPPORTED),
    ("void consume(State &&state);", UNSUPPORTED),
    ("int run(int argc, char **argv);", UNSUPPORTED),
    ("void fill(double values[]);", UNSUPPORTED),
    ("void log(const char *format, ...);", UNSUPPORTED),
    ("void swap(std::pair<State *, double> &a, std::pair<State *, double> &b);", UNSUPPORTED),
]


def _param_is_unsupported(spelling: str) -> bool:
    s = " ".join(spelling.split())
    if "&&" in s or "..." in s or "[" in s or "**" in s:
        return True
    if _param_is_callable(s):
        return False  # callable is its own category, never a composite ref
    if s.endswith("&"):
        core = s[:-1].strip()
        if core.startswith("const ") or core.endswith(" const"):
            return False
        if "shared_ptr" in core:
            return False  # shared-handle category
        if core.split("<")[0].split("::")[-1].endswith("Ptr"):
            return False  # handle alias, shared-handle category
        if "ostream" in core:
            return False  # stream category
        if "<" in core:
            return True  # mutable ref to a templated composite
    return False


def _param_is_callable(spelling: str) -> bool:
    return "std::function<" in " ".join(spelling.split())


def oracle_classify(param_spellings: list[str]) -> str:
    if any(_param_is_unsupported(p) for p in param_spellings):
        return UNSUPPORTED
    if any(_param_is_callable(p) for p in param_spellings):
        return CALLBACK
    return DIRECT
