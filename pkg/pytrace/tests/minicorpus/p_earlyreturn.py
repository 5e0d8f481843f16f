def classify(n):
    if n < 0:
        return "neg"
    if n == 0:
        return "zero"
    return "pos"

def tag(n):
    return str(n) + ":" + classify(n)

def describe_all(xs):
    parts = []
    for x in xs:
        parts.append(tag(x))
    return " ".join(parts)

print(describe_all([-1, 0, 5]))
