def on_start():
    return "started"

def on_stop():
    return "stopped"

HANDLERS = {"start": on_start, "stop": on_stop}

def fire(event):
    handler = HANDLERS[event]
    return handler()

print(fire("start"))
print(fire("stop"))
