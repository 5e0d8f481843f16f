def emit(n):
    total = 0
    for k in range(n):
        total = total + k
        yield total

def consume(n):
    out = []
    for v in emit(n):
        out.append(v)
    return out

print(consume(4))
