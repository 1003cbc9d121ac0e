/**
 * Harness for compile-smoking generated binding sources.
 *
 * The binding generator is driven purely through its command line and JSON
 * output; nothing here imports its internals.  Fixture headers are copied
 * into a temporary workspace, bindings are scaffolded and emitted there,
 * and each translation unit is compiled object-only against the framework
 * headers (the bundled stand-ins by default, or a real installation via
 * NANOBIND_INCLUDE_DIR).
 */

import { spawnSync } from "node:child_process";
import { cpSync, mkdirSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

export const smokeRoot = path.dirname(path.dirname(fileURLToPath(import.meta.url)));

/** Binding sources the generator produces for the fixture library. */
export const fixtureUnits = [
  "core/Point.cpp",
  "core/EventSource.cpp",
  "core/Shape.cpp",
] as const;

/** Aggregator translation unit defining the extension module entry point. */
export const aggregatorUnit = "python.cpp";

export interface RunResult {
  status: number | null;
  stdout: string;
  stderr: string;
}

export interface CompileOutcome {
  ok: boolean;
  command: string;
  /** Compiler stdout and stderr, verbatim. */
  output: string;
}

export interface LintDiagnostic {
  rule_id: string;
  severity: string;
  location: { file: string; line: number };
  message: string;
  fix_hint: string;
}

export interface LintOutcome {
  status: number | null;
  diagnostics: LintDiagnostic[];
  ruleIds: string[];
}

export interface Workspace {
  root: string;
  manifestPath: string;
  includeDir: string;
  bindingsDir: string;
}

/** Directory with the framework headers used for compilation. */
export function frameworkIncludeDir(): string {
  const override = process.env.NANOBIND_INCLUDE_DIR;
  if (override !== undefined && override !== "") {
    return override;
  }
  return path.join(smokeRoot, "framework", "include");
}

const compilerCache: { probed: boolean; found: string | null } = {
  probed: false,
  found: null,
};

/** First working C++ compiler, or null when none responds. */
export function detectCompiler(): string | null {
  if (!compilerCache.probed) {
    compilerCache.probed = true;
    const candidates = [process.env.CXX, "c++", "g++", "clang++"];
    for (const candidate of candidates) {
      if (!candidate) {
        continue;
      }
      const probe = spawnSync(candidate, ["--version"], { encoding: "utf8" });
      if (probe.status === 0) {
        compilerCache.found = candidate;
        break;
      }
    }
  }
  return compilerCache.found;
}

const generatorCache: { probed: boolean; found: string[] | null } = {
  probed: false,
  found: null,
};

/** Argument vector invoking the binding generator, or null when absent. */
export function detectGenerator(): string[] | null {
  if (!generatorCache.probed) {
    generatorCache.probed = true;
    const candidates = [["bindforge"], ["python3", "-m", "bindforge.cli"]];
    for (const argv of candidates) {
      const probe = spawnSync(argv[0]!, [...argv.slice(1), "--help"], {
        encoding: "utf8",
      });
      if (probe.status === 0) {
        generatorCache.found = argv;
        break;
      }
    }
  }
  return generatorCache.found;
}

/** Copy the fixture library into a fresh temporary workspace. */
export function createWorkspace(): Workspace {
  const root = mkdtempSync(path.join(tmpdir(), "bindforge-smoke-"));
  cpSync(path.join(smokeRoot, "fixture"), root, { recursive: true });
  return {
    root,
    manifestPath: path.join(root, "bindforge.yaml"),
    includeDir: path.join(root, "include"),
    bindingsDir: path.join(root, "bindings"),
  };
}

export function destroyWorkspace(ws: Workspace): void {
  rmSync(ws.root, { recursive: true, force: true });
}

/** Run one generator command against the workspace manifest. */
export function runGenerator(ws: Workspace, args: string[]): RunResult {
  const argv = detectGenerator();
  if (argv === null) {
    throw new Error("binding generator CLI is not available");
  }
  const result = spawnSync(
    argv[0]!,
    [...argv.slice(1), "--manifest", ws.manifestPath, ...args],
    { encoding: "utf8" },
  );
  return {
    status: result.status,
    stdout: result.stdout ?? "",
    stderr: result.stderr ?? "",
  };
}

/** Scaffold the binding tree and emit every source, failing loudly. */
export function generateBindings(ws: Workspace): void {
  for (const args of [["scaffold"], ["emit", "--all"]]) {
    const result = runGenerator(ws, args);
    if (result.status !== 0) {
      throw new Error(
        `generator ${args.join(" ")} exited ${result.status}:\n${result.stderr || result.stdout}`,
      );
    }
  }
}

/** Compile one source file to an object, nothing linked. */
export function compileSource(
  ws: Workspace,
  sourcePath: string,
  extraIncludeDirs: string[] = [],
): CompileOutcome {
  const cxx = detectCompiler();
  if (cxx === null) {
    throw new Error("no C++ compiler is available");
  }
  const objectPath = `${sourcePath}.o`;
  const args = [
    "-std=c++17",
    "-c",
    sourcePath,
    "-o",
    objectPath,
    "-I",
    frameworkIncludeDir(),
    "-I",
    ws.includeDir,
    "-I",
    ws.bindingsDir,
  ];
  for (const dir of extraIncludeDirs) {
    args.push("-I", dir);
  }
  const result = spawnSync(cxx, args, { encoding: "utf8" });
  return {
    ok: result.status === 0,
    command: [cxx, ...args].join(" "),
    output: `${result.stdout ?? ""}${result.stderr ?? ""}`,
  };
}

/** Compile one generated binding unit named relative to the binding tree. */
export function compileUnit(ws: Workspace, relSource: string): CompileOutcome {
  return compileSource(ws, path.join(ws.bindingsDir, relSource));
}

/** Lint one file with classification context taken from the manifest. */
export function lintFile(ws: Workspace, filePath: string): LintOutcome {
  const result = runGenerator(ws, ["--format", "json", "lint", filePath]);
  let diagnostics: LintDiagnostic[] = [];
  try {
    const parsed: unknown = JSON.parse(result.stdout);
    if (Array.isArray(parsed)) {
      diagnostics = parsed as LintDiagnostic[];
    }
  } catch {
    // Non-JSON output means a usage failure; surface it via the status.
  }
  return {
    status: result.status,
    diagnostics,
    ruleIds: diagnostics.map((d) => d.rule_id),
  };
}

/* Seeded defects.  Each mutation is a plain text transform of a known-good
   generated source; the suite asserts the toolchain rejects the result
   either at compile time or in lint. */

/** Add an include of a header the framework does not ship. */
export function mutateUnknownInclude(text: string): string {
  return text.replace(
    "#include <nanobind/nanobind.h>",
    "#include <nanobind/nanobind.h>\n#include <nanobind/make_shared.h>",
  );
}

/** Pass a smart-pointer holder as a class_ template argument. */
export function mutateHolderArgument(text: string, qualifiedClass: string): string {
  return text
    .replace(
      `nb::class_<${qualifiedClass}>`,
      `nb::class_<${qualifiedClass}, std::shared_ptr<${qualifiedClass}>>`,
    )
    .replace(
      "#include <nanobind/nanobind.h>",
      "#include <nanobind/nanobind.h>\n#include <nanobind/stl/shared_ptr.h>",
    );
}

/** Understate the trampoline slot count by one. */
export function mutateTrampolineCount(text: string): string {
  return text.replace(
    /NB_TRAMPOLINE\(([^,]+),\s*(\d+)\)/,
    (_match, cls: string, count: string) =>
      `NB_TRAMPOLINE(${cls}, ${Number(count) - 1})`,
  );
}

export interface MutantCheck {
  compile: CompileOutcome;
  lint: LintOutcome;
  lintErrorRules: string[];
  /** True when the defect failed to compile or lint reported an error. */
  rejected: boolean;
}

/**
 * Write a mutated copy of a generated unit and run both checks on it.
 * The pristine binding tree is left untouched; the original unit's
 * directory is added to the include path so quote includes still resolve.
 */
export function checkMutant(
  ws: Workspace,
  relSource: string,
  mutate: (text: string) => string,
  mutantName: string,
): MutantCheck {
  const original = readFileSync(path.join(ws.bindingsDir, relSource), "utf8");
  const mutated = mutate(original);
  if (mutated === original) {
    throw new Error(`mutation ${mutantName} did not change ${relSource}`);
  }
  const mutantDir = path.join(ws.root, "mutants");
  mkdirSync(mutantDir, { recursive: true });
  const mutantPath = path.join(mutantDir, mutantName);
  writeFileSync(mutantPath, mutated, "utf8");

  const compile = compileSource(ws, mutantPath, [
    path.dirname(path.join(ws.bindingsDir, relSource)),
  ]);
  const lint = lintFile(ws, mutantPath);
  const lintErrorRules = lint.diagnostics
    .filter((d) => d.severity === "error")
    .map((d) => d.rule_id);
  return {
    compile,
    lint,
    lintErrorRules,
    rejected: !compile.ok || lintErrorRules.length > 0,
  };
}
