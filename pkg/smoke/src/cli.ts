/**
 * Script entry point for the compile smoke run.
 *
 * Prints one line per check.  A missing compiler or generator is reported
 * as SKIP and exits zero: absence of a toolchain is not a smoke failure.
 */

import {
  aggregatorUnit,
  checkMutant,
  compileUnit,
  createWorkspace,
  destroyWorkspace,
  detectCompiler,
  detectGenerator,
  fixtureUnits,
  frameworkIncludeDir,
  generateBindings,
  mutateHolderArgument,
  mutateTrampolineCount,
  mutateUnknownInclude,
} from "./harness.js";

function main(): number {
  const cxx = detectCompiler();
  const generator = detectGenerator();
  if (cxx === null || generator === null) {
    const missing = cxx === null ? "C++ compiler" : "binding generator CLI";
    console.log(`SKIP: no ${missing} available`);
    return 0;
  }
  console.log(`compiler: ${cxx}`);
  console.log(`generator: ${generator.join(" ")}`);
  console.log(`framework headers: ${frameworkIncludeDir()}`);

  const ws = createWorkspace();
  let failures = 0;
  try {
    generateBindings(ws);

    for (const unit of [...fixtureUnits, aggregatorUnit]) {
      const outcome = compileUnit(ws, unit);
      console.log(`${outcome.ok ? "PASS" : "FAIL"} compile ${unit}`);
      if (!outcome.ok) {
        failures += 1;
        process.stderr.write(outcome.output);
      }
    }

    const mutations: Array<{
      name: string;
      unit: string;
      mutate: (text: string) => string;
    }> = [
      {
        name: "unknown_include.cpp",
        unit: "core/Point.cpp",
        mutate: mutateUnknownInclude,
      },
      {
        name: "holder_argument.cpp",
        unit: "core/Point.cpp",
        mutate: (text) => mutateHolderArgument(text, "dc::Point"),
      },
      {
        name: "trampoline_count.cpp",
        unit: "core/Shape.cpp",
        mutate: mutateTrampolineCount,
      },
    ];
    for (const mutation of mutations) {
      const check = checkMutant(ws, mutation.unit, mutation.mutate, mutation.name);
      const how = check.compile.ok
        ? `lint: ${check.lintErrorRules.join(",")}`
        : "compile error";
      console.log(
        `${check.rejected ? "PASS" : "FAIL"} reject ${mutation.name} (${how})`,
      );
      if (!check.rejected) {
        failures += 1;
      }
    }
  } catch (error) {
    console.error(String(error));
    failures += 1;
  } finally {
    destroyWorkspace(ws);
  }
  return failures === 0 ? 0 : 1;
}

process.exitCode = main();
