// Tiny deterministic PNG payloads for integration tests.

export const PERSON_PNG_B64 =
  "iVBORw0KGgoAAAANSUhEUgAAACAAAAAgCAIAAAD8GO2jAAAMK0lEQVR4nAEgDN/zAHleTg8a3DLJ" +
  "a3N8ovSaGY3z6KDL9XRvPt8Nc92vuZ5VT+bo90iulVFMmYtbHiLhYyRHllOVCiLNdn77L7rGPheq" +
  "n0bpI9mlX/iB4TU5I5TKkP/CughLOMLHPBS9sRuemgQ9Vkl/Q9SAWMsKgFoFJgXPwhtS9xedfsQH" +
  "puL45S7zpSj8Yj2NdtXghIy3VKLWTWncly02CdPcEghk/bhANDMSNBYRexg4bfdjpGkNEqjYkFzQ" +
  "py729CVlnqoxEII5EuoCwCHslCbEBQ4I3TfHbp0jZYt6bqsJ3X01Nr4Mg35DJGovHvNBF1ixS+R5" +
  "5dse1/5NA/G/sMXoVTaNPzoxsdBR35kySTsfGQJ584+nEx09Y9oS1ZW4FK9NbASN0019/gMnANVx" +
  "Rm8vqe7MT7AdasmgI3Hfan3U9Ry5q9XLQrhl0Wn5gcZaz53HHDV51yCkncKQoUM5YBu9akYV0Hcg" +
  "vrs1DndLQTP75dpMKQdZMqnHZDjEBm1lBBuCaRvO9clP+JzJcQTzCKjVeFJBRunf2Q5/UqsHadwc" +
  "NpU8wFjSXY1WfPlMzJy/xagEK0NNPiE3EaWNKm9tYIaLFikpd2sg48bvtyfLfiz0NpFFJ/uaLC3X" +
  "z0gdO/BV20bY89fh68FbeiHXOTUCWjTyn4wbm8rd3++bT7aSykH9TUMVMX/eWQG5oruY+1iwBC2H" +
  "tuAUkMuSJSQyW0PClPGSI5cdFPGHG9z+p3RYsW5neFcd8T/L7KaujJ4CefAyNlY3MEXYoq3c4m4O" +
  "1hIJAAlRAieCav/BDB3ayXtPEk4MJdLpq8Me9WZzx0a1xBDJBdZdzJes3dUI7cLhbd6+BzcwIzRL" +
  "vgc+6wTXxJkBDFFOp9/c21J74RQ50J32YOKN+7acfrgTa61hFbQPsWG0gQT526trhs6DoAQAqBE/" +
  "X2z4t+AyYVnso4UHcdr29idadEwOtnI6AUgCxt+jVSrE7OmosWcMjA2CgUtitVJ2jcDVuNHYy+Dr" +
  "A42BdYUHgiB31dbygk+M+i1HO/9B+EbAH0YAbolLxqco/9nVlD8j8P/GbsHRmzriQM4Tliesx+hr" +
  "5GNnCG/0FPg+NBTAuGKyu6thnehGwaBOgnXubAjZCNQ+/j3LdDkB7HFvrMMhQ9h30BBdH9dApVG/" +
  "XL+NeKJxWN93AAoXtEBUXndQxCOfBPNZyhj3Dx1WpQ3r/Dlh1aPr7ecTskA1uNOlBrsXkpttp+eb" +
  "i7h92G0anynVwguSbRJ+1K2CHMYFYQCRECkeES7WDBoHDndQey2oMxbwfPuePzozrQBVaqPspcOR" +
  "J3Zp3MeRGJ0oJKuRjsA3U2CqtAsiJgtUBamOHx8hAzz2kl//Z4Ds97RQKx1esy20oy1XLlzV3Q3K" +
  "v0lXg9Mh5/8x3yIfFKGBIJzhuSeUk4fM1FdDCCOEC9cAHtBxrRSyCYQwMxEPTbDARit2bvCMV47J" +
  "KDiU8uaEzCiodeMKuvuA/Dzr2tKk5tNAJNqhxNlyBdDwTPrE9WrdqtWgQd9CYBKgTIcFFxFkl7AP" +
  "8PYJzwyLC8nIihYeZvMTBPnQZeycMqL5vIT2TMdCrYbnOfm0qDC1q1Yu1GdXHiC42M6fXbobIazh" +
  "htbRoZs0uCKGxWW4FQAIGDtVob/KjTKXcRl/L66Tw7eVDYWUxjIewUY+sCApsbat/PdLoOKY4QJY" +
  "4HxPbnUG6C4Oxyxo2iPpBtE07ILIEk9pUfB82dm6so51NB+aGdAg4yedt2Z6aj5fNlLMB+LfuRpE" +
  "cvwuxe4QiQHFkhHhGFj2fWjN11krFv6Af8o02xyvT0He9kfanhQCUpNu6v41CPy6+1DUWVoH0of+" +
  "NTRn+gO0XPb3YsQ4dlC0FtjvbfAeJ6Q4nlh10PPSKyn9Wjuz0yKDiqfy8RhjjmP0MZqJYIiBtzgu" +
  "eN2e/bISrwmKFeM7K4eG+dEcDS22BKuGKvuW9lsuYqPdzhHGiYABKZE7HpXKakjZDfghVRQyDw+j" +
  "OPZ2PMkg3QI7WeeDiPZRJhlmlCbtG3mjz7F1jdeF1oCCtAzN+EZRQnPozUAPWnAcxedH0hmBD1DU" +
  "uN276QGFx8sCxsgtPJnu7+5Brd63znwdd9+H+kN9zYB09KYCFSPm2NGkKoDvhhFHA7whLNOJlZZU" +
  "bXI325vc7cgR/TAxuEEknmDo3CJZyUNNffQK9AN3y54G6PvQ/T/5hzfk3vAByrKIHC8c4XL9KIsB" +
  "d/zehrvFh3oSigjxSxTbkw9M7HqxkMQ6fPUEkvPymze3PkcvF+Mx5uHIjN7f2sS97U1qPQFo4sjM" +
  "dKq/r4W0b8yZy53RzWhBk1UOnk/IU5C26SanArGEUY4lIKpxwe6KicFDQwJ0fUZdaq+OVve6G+YC" +
  "Lb7fmdaNh3JWqtvG5dbzgS/zrP2OGTv+N8M2IbcUyQ9D21P/N9BlMi2faA4A9m9FWr2fU/cVxWer" +
  "HNnt4yF+zvrYeAB3jCbCM9BjYz5pc9qcj7Xc7K8LQV9HUveSSKRrygPxGeF1Wlf4OATS8BP3RVyz" +
  "+BelaGhDoEHzUScylz8TzGjTcVQWEmLsQKAFDvDnwOc2GxihLE9cfviFFxzCN2n2MlQCsRYannR0" +
  "0p5mbVHphqFJZqgK0/7B8N2J8dI10ZLFmVFmfko9EwrugbYZ8T2hIYPrAOkK7rKwni7/hz7PBj9o" +
  "/WcGs9q1dSww/FnHdCQDw/pu7rmrQy87uij9wIbWsSIdAi4Zjm2P5O5pACj+SVIb8SmOHOhtYnHe" +
  "3xjGCZy8fpFV2dfcezY+YW7IJgqcieHWpkrfax6ovPr6r3cmW1yVxezJpdQRbxg2uRxUWN/7dZsG" +
  "Y3Yo0pStE8UzGRAiIrolcgC/zD3T/4BoMoOZkBmq3UoQtagwkyzvHIBc5TFKn5re/0xpaF58Odsj" +
  "/VCnia6WoM2ThCVLf0NrF/8h0wDD+1sUk6jeBe9ymmMEZeyxJxwitghgEuvNoobp6jbL/Z4t5gIC" +
  "lnVK5dVpwy+tT9OcHr2/PwrNVB/jPprDde3xroSY7RNl/3tiJH5erusbIRcjS8Qx09xmcU0f5AA2" +
  "LfZN0rUYLjMZHdnOdfNv3V5+FgUvNU8jFhGplYTDA872HG1+4GxwAPWicQ03lKlNaS3iPZ9ti2mm" +
  "MUVd/1qbA2kACRNYsVRaj/LuWy2ktmGOEfb7T4DEh+BJPSEJPzU8RnwG+SCO9w9jSojJ0hqz5wYP" +
  "ZKyVsVpeAFs/j3DuyEf6s9On0TJzgADety9HP0DX9RouniGpBtjTye6xsJUysHR6cDbVZs/1FsHd" +
  "jRCqna8O8IfcAZjv8eiAdUZa+i4WbMmpeYrr7SiH0AItYdXcxyZjetUhx/e7lF3fpjUmEiHU4kfC" +
  "1yvR1sYAs6056LEzJPX8GvM+DiSnV5qrZcfdEe1V6v5dR6qV/LADnEtOr9bBOjiW6B4L8OJLU2R5" +
  "wKF/LG1gNWD/MPaQ8oaYQswvzmzz5tPhAmbk61OX7wgKFP1sxpIkDgsDQG03BGUbFn6cVIb4/tMD" +
  "57drcfaWnawBIwLw+DGQP9/aMj/XpEMdqFjILW8k9kBDGGbjFee2QVsRhWlT8Ga87qAfCCPLhA+X" +
  "OjyxvBcJKYtCNvpaVBsBlnlWZD8fU2GFLeBSBQB1NKZoP1Uaod4VPvR4U24Z6TTMhr/KNEUleKw8" +
  "qNIG27AlDl/KIxfxFH3C706zCjs+Tz7kqFXv08pl7rffPuF3xqznRet8Nw5FU8cV2rxhF83zCi0i" +
  "xX+VME0gh92rN7EBT5gzwePtjrUp5fRS0DXiX9EbW3dQN3XjTdOOh999gLqqvabsH6VtDhXTiCuI" +
  "rfot3k3nhv9z6+TGJC34Y7IkLCxDtivN1I9r/hCe59r01736dqyjcDDpw33TokORCDyUAQCA8bvD" +
  "BPIsbDcl9aznNsizX72Ztz93w+1yizRLQdDT2y1oYf3lScSbpt4djbJXETvemRYDF9NCOBQ09A33" +
  "gNXMwKarphDvgs3HYT+RlqbxtdOd9S+3YvnsKknef8VJDwKzHUD9NnSo2tYdQ09le411GWXB9vbK" +
  "O8sBZaNTiDKcSKBxW2pTQKLKKttl4tXAtedlf+34/hFE/jYQPlrZH5Z5CMRFFM//b6pVvvp3VB4z" +
  "NPDz/CETj/U7OAPnnW+gqelOrQXDF0U0ygAAAABJRU5ErkJggg==";

export const GARMENT_PNG_B64 =
  "iVBORw0KGgoAAAANSUhEUgAAAAgAAAAICAIAAABLbSncAAAA00lEQVR4nAHIADf/AfdY/n32/BiW" +
  "Ps4VvC7d7LStLi6AmbqyHQR98tWDDgieeOyl9zUxnXOmW9Tp+pv5MC8Bns4P57EKQV4sFrqWivfJ" +
  "AYtLxP3zu4MAAIX5zcMURXnvPz5BKOiL7YYaHeaXJf7hGAKP9Qriu/lt4y3UvP5mOBwXP+1cvExa" +
  "/zgBjE9zWAAxLc7XggwJBvsPhEApK48xPnFyBAcBugO/UWj88rN7fRTyvb1rJPACg2LwuwAiDq3V" +
  "Jf8igU8s9YhF1WbDPXcLw+pNs9umxWHfETveFAAAAABJRU5ErkJggg==";

export const MAKEUP_PNG_B64 =
  "iVBORw0KGgoAAAANSUhEUgAAAAgAAAAICAIAAABLbSncAAAA00lEQVR4nAHIADf/AWOWWPhFbT8b" +
  "7X0w+enqK5cKfc/661VRNwIuQ8pGW1yIOwks5uviNlzmMQzfqWlmpwEC+WUzJ2Jg1N6xGaZC6ivF" +
  "oKhHcJ/fB3QWAh8DVw7qyUGyZ1DgyaMOW/ApBad4fMzUGgHH0OXXPl0NH+kwkaqbsNTcvmoIK631" +
  "Kf0Et9Mi3fO5UXcgVXcl2E2mZLDH+N4k8Is7Avfj6IUZOEJuClcPNQzUWTGOagNYAYEWMAFP39dB" +
  "hn0DZtUEbHu+Be8bsk1sGA2W8fPiBVy58tw3qAAAAABJRU5ErkJggg==";

export const OBJECT_PNG_B64 =
  "iVBORw0KGgoAAAANSUhEUgAAAAgAAAAICAIAAABLbSncAAAA00lEQVR4nAHIADf/AAPrrKV17N/q" +
  "cJz3pPkjyhBtyEGZDAJjUAE5+/GmMTv72/3vg9Zx2FD5kCXmKwo12NUAXmL2EtlV5gOiKfCrBSuA" +
  "l0K+0ocvBAxzAOqwDc1zbD658yYRTiQ9V036NpXUmdYlVABSTRn91hNoDb1oIgMwuBfh/yhOOOzU" +
  "kXUBb4sm3rnKMuTvyNvcRBOx7NcKnPCGi032BN0yRjpi7FpD8+18+IpUZseh0OO2X7WwwAKP/J10" +
  "va4voPrnJOrJDj799+ZqYKslpy19WmdHiipVkgAAAABJRU5ErkJggg==";
