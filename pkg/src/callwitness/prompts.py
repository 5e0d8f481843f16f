"""Prompt templates for evaluation, harness generation, and reasoning traces.

The three templates are fixed text with named slots; rendering fills the
slots and nothing else, so a rendered prompt is byte-deterministic. The
worked examples are small programs whose answers demonstrate the tricky
rules (implicit constructor calls, alias resolution, runtime dispatch).
"""

from __future__ import annotations

from .schema import Language

DISPLAY_NAMES = {
    Language.PYTHON: "Python",
    Language.JAVASCRIPT: "JavaScript",
    Language.JAVA: "Java",
}

EVAL_SYSTEM_TEMPLATE = """\
You are an expert in {language} programming. You will examine and identify
the function calls in the given code. You must examine the code in detail by
resolving aliases, tracking variable assignments, following return values, and
understanding inheritance/method resolution.\
"""

EVAL_USER_TEMPLATE = """\
## Task Description

**Objective**: Examine the given {language} code and identify the function
calls that occur when this program is executed, then answer the questions.

**Instructions**:
1. For each question, list the function calls as a comma-separated list.
2. Do not include additional explanations or commentary.
3. Include both explicit and implicit function calls (e.g., __init__ when an
   object is created).
4. If a function is called through an alias or variable, resolve it to the
   actual function being called.
5. If a passed argument is not invoked within the function, do not include it.
6. If there are no function calls, leave the answer empty.
7. **IMPORTANT**: Always use fully qualified names with the module prefix.
   For example, use "main.MyClass.func" not "MyClass.func". The module name
   is the filename without extension (e.g., "main.py" -> "main").

**Format for Answers**:
- Provide your answer next to each question number.
- Do not include the questions in your answer.
- Example:
    1. module.func1, module.func2
    2. module.func3
    3.

{example}

**{language} Code Provided**:

{code}

**Questions**:
{questions}

**Answers**:
"""

# One worked example per language. Each shows a complete mini program,
# the questions it would produce, and the expected answers.
WORKED_EXAMPLES = {
    Language.PYTHON: """\
**Worked Example (Python)**:

Code:
    def greet(name):
        return "hi " + name

    class Greeter:
        def __init__(self, name):
            self.name = name

        def run(self):
            return greet(self.name)

    g = Greeter("sam")
    g.run()

Questions:
1. What functions are called by example.<toplevel>?
2. What functions are called by example.Greeter.run?

Answers:
1. example.Greeter.__init__, example.Greeter.run
2. example.greet\
""",
    Language.JAVASCRIPT: """\
**Worked Example (JavaScript)**:

Code:
    function area(r) {
      return 3.14 * r * r;
    }

    const compute = area;
    function report(r) {
      return compute(r);
    }

    report(2);

Questions:
1. What functions are called by example.<toplevel>?
2. What functions are called by example.report?

Answers:
1. example.report
2. example.area\
""",
    Language.JAVA: """\
**Worked Example (Java)**:

Code:
    class Shape {
        double area() { return 0.0; }
    }
    class Circle extends Shape {
        double area() { return 3.14; }
    }
    public class Main {
        static double measure(Shape s) { return s.area(); }
        public static void main(String[] args) {
            Shape c = new Circle();
            System.out.println(measure(c));
        }
    }

Questions:
1. What functions are called by Main:<toplevel>?
2. What functions are called by Main:main?
3. What functions are called by Main:measure?

Answers:
1. Main:main
2. Circle:<init>, Main:measure
3. Circle:area\
""",
}

QUESTION_TEMPLATE = "{index}. What functions are called by {caller}?"

HARNESS_TEMPLATE = """\
You are converting real-world code into a self-contained program for
call graph analysis.

Below is a {language} source file from the {repo} project. Your task:

1. **Preserve the call patterns**: keep the same function/method call
   relationships
2. **Remove all external dependencies**: replace imports with stubs or
   inline implementations
3. **Make it self-contained**: the code must run on its own with no
   external packages
4. **Add an entry point**: {entry_point_instruction}
5. **Keep it 15-40 lines**: simplify if needed, but preserve the call
   structure
6. **Use realistic names**: don't rename to func1/func2, keep meaningful
   names from the original

## Original code from {repo}:
```
{source}
```

## Output format:
Return ONLY the rewritten code. No markdown, no explanation. Just the
runnable code.
"""

ENTRY_POINT_INSTRUCTIONS = {
    Language.PYTHON: "ensure module-level calls trigger all interesting function calls.",
    Language.JAVASCRIPT: "ensure module-level calls trigger all interesting function calls.",
    Language.JAVA: (
        "ensure there is a public static void main(String[] args) that "
        "triggers all calls; include the package declaration."
    ),
}

COT_TEMPLATE = """\
You are an expert programmer analyzing function calls in code.

Given the source code and questions below, produce a step-by-step reasoning
trace that walks through the code to identify all function calls, then
provide the final answers.

**Your output format must be:**
<think>
[Your step-by-step reasoning here. For each function/scope in the questions:
- Identify what code executes in that scope
- Trace variable assignments and aliases
- Resolve which functions are actually called
- Note implicit calls like __init__ from object creation
- Be concise but thorough]
</think>

[Numbered answers, one per line, matching the question numbers]

**Important:**
- The <think> block contains your reasoning process
- After </think>, output ONLY the numbered answers (no extra text)
- Use fully qualified names (e.g., main.func, main.MyClass.__init__)
- If no function calls, leave the answer empty

Here is the code and questions:

{user_prompt}

**Ground truth answers (use these as the correct answers):**
{ground_truth_answer}

Generate the reasoning trace that explains HOW you would arrive at these
answers by analyzing the code step by step, then output the answers.
"""
