"""Search for a 6-square half-translation surface whose corners form four
3*pi cone points (genus 2, all zeros simple). Prints the side pairing."""
import random, math

def build(pairs):
    # square q: slots 6q+0 bottom,+1 right,+2 diag(TR->BL) in tri 2q
    #           6q+3 diag(BL->TR),+4 top,+5 left in tri 2q+1
    vec = {}
    for q in range(6):
        vec[6*q+0]=(1,0); vec[6*q+1]=(0,1); vec[6*q+2]=(-1,-1)
        vec[6*q+3]=(1,1); vec[6*q+4]=(-1,0); vec[6*q+5]=(0,-1)
    side_slot = {0:0, 1:1, 2:4, 3:5}
    partner = {}
    for q in range(6):
        partner[6*q+2]=6*q+3; partner[6*q+3]=6*q+2
    for (qa,sa),(qb,sb) in pairs:
        a=6*qa+side_slot[sa]; b=6*qb+side_slot[sb]
        partner[a]=b; partner[b]=a
    return vec, partner

def vertices(partner):
    parent=list(range(36))
    def f(x):
        while parent[x]!=x:
            parent[x]=parent[parent[x]]; x=parent[x]
        return x
    nxt=lambda s: (s//3)*3+(s%3+1)%3
    for s in range(36):
        # start(s) ~ end(partner(s)) = start(next(partner(s)))
        a=f(s); b=f(nxt(partner[s]))
        parent[a]=b
    return [f(s) for s in range(36)]

def angles(vec, partner):
    roots=vertices(partner)
    prv=lambda s: (s//3)*3+(s%3+2)%3
    ang={}
    for s in range(36):
        u=vec[s]; w=vec[prv(s)]; w=(-w[0],-w[1])
        a=math.atan2(u[0]*w[1]-u[1]*w[0], u[0]*w[0]+u[1]*w[1])
        ang[roots[s]]=ang.get(roots[s],0)+a
    return ang

random.seed(7)
for trial in range(200000):
    horiz=[(q,0) for q in range(6)]+[(q,2) for q in range(6)]
    vert=[(q,1) for q in range(6)]+[(q,3) for q in range(6)]
    random.shuffle(horiz); random.shuffle(vert)
    pairs=[(horiz[2*k],horiz[2*k+1]) for k in range(6)]+[(vert[2*k],vert[2*k+1]) for k in range(6)]
    if any(a==b for a,b in pairs): continue
    vec,partner=build(pairs)
    ang=angles(vec,partner)
    if len(ang)==4 and all(abs(v-3*math.pi)<1e-9 for v in ang.values()):
        # connectivity of squares
        adj={q:set() for q in range(6)}
        for (qa,_),(qb,_) in pairs: adj[qa].add(qb); adj[qb].add(qa)
        seen={0}; st=[0]
        while st:
            x=st.pop()
            for y in adj[x]:
                if y not in seen: seen.add(y); st.append(y)
        if len(seen)==6:
            print(trial, sorted(pairs)); break
