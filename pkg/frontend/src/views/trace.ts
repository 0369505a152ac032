// Trace stepper: walk the assignment chain that leads to a violating step.

import { clear, el, button } from "../dom.js";
import type { TraceStep } from "../types.js";

export interface StepperState {
  steps: TraceStep[];
  position: number;
  highlighted: Set<number>;
}

export function makeStepper(
  steps: TraceStep[],
  highlighted: number[],
): StepperState {
  return {
    steps,
    position: steps.length > 0 ? steps.length - 1 : 0,
    highlighted: new Set(highlighted),
  };
}

export function stepLabel(step: TraceStep): string {
  if (step.lhs) {
    return `${step.lhs} := ${step.value}`;
  }
  if (step.call) {
    return `call ${step.call}()`;
  }
  return "(location)";
}

export function renderStepper(state: StepperState): HTMLElement {
  const root = el("div", { class: "trace-stepper" });

  const draw = () => {
    clear(root);
    const controls = el("div", { class: "stepper-controls" });
    controls.append(
      button("◀ prev", () => {
        if (state.position > 0) {
          state.position -= 1;
          draw();
        }
      }),
      el("span", { class: "stepper-pos" }, [
        ` step ${state.position + 1} / ${state.steps.length} `,
      ]),
      button("next ▶", () => {
        if (state.position < state.steps.length - 1) {
          state.position += 1;
          draw();
        }
      }),
    );
    root.append(controls);

    const list = el("ol", { class: "trace-steps" });
    state.steps.forEach((step, idx) => {
      const classes = ["trace-step"];
      if (idx === state.position) classes.push("current");
      if (state.highlighted.has(step.index)) classes.push("root-source");
      const where = step.location.file
        ? `${step.location.file.split("/").pop()}:${step.location.line} in ${step.location.function}`
        : step.location.function || "?";
      list.append(
        el("li", { class: classes.join(" ") }, [
          el("code", {}, [stepLabel(step)]),
          el("span", { class: "trace-where" }, [` ${where}`]),
        ]),
      );
    });
    root.append(list);
  };

  draw();
  return root;
}
